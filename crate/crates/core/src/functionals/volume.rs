use crate::density::LogDensity;
use crate::error::Result;
use crate::legendre::{polar_density, DualGrid};
use crate::logquad::LogQuad;
use crate::quadrature::{log_integral, Measure};

/// `log v(f) = log int f + log int f°`. The tail ratio is the larger of the
/// two integrals' ratios; a large value means `f°` was cut by the dual box.
pub fn volume_product(f: &LogDensity, dual: &DualGrid) -> Result<LogQuad> {
    let polar = polar_density(f, dual)?;
    Ok(log_integral(f, Measure::Lebesgue).mul(&log_integral(&polar, Measure::Lebesgue)))
}

/// [`volume_product`] on [`DualGrid::for_density`].
pub fn volume_product_auto(f: &LogDensity) -> Result<LogQuad> {
    volume_product(f, &DualGrid::for_density(f)?)
}
