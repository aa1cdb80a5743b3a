use std::f64::consts::PI;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::exponents::ExponentSchedule;
use crate::logquad::LogQuad;
use crate::quadrature::{log_integral, Measure};

use super::revhc::ou_power_integral;

/// Values of `(2 pi)^n (int f)^{-q/p} ||P_s[(f/gamma)^{1/p}]||_{L^q(gamma)}^q`
/// along a decreasing list of times, endpoint exponents at each.
#[derive(Debug, Clone, PartialEq)]
pub struct TropicalCurve {
    pub points: Vec<(f64, LogQuad)>,
    /// Set when the list was cut short because the OU kernel at the next
    /// time is narrower than the grid spacing.
    pub truncated: bool,
}

pub fn tropical_limit_curve(f: &LogDensity, s_list: &[f64]) -> Result<TropicalCurve> {
    if s_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("times must be strictly decreasing".into()));
    }
    let n = f.dim() as f64;
    let mass = log_integral(f, Measure::Lebesgue);
    let mut points = Vec::with_capacity(s_list.len());
    for &s in s_list {
        let e = ExponentSchedule::endpoint(s)?;
        let integral = match ou_power_integral(f, s, e.p, e.q) {
            Ok(v) => v,
            Err(Error::KernelUnderResolved { .. }) => {
                return Ok(TropicalCurve {
                    points,
                    truncated: true,
                })
            }
            Err(err) => return Err(err),
        };
        let log = n * (2.0 * PI).ln() - e.q / e.p * mass.log_abs + integral.log_abs;
        points.push((
            s,
            LogQuad::positive(log, integral.tail_ratio.max(mass.tail_ratio)),
        ));
    }
    Ok(TropicalCurve {
        points,
        truncated: false,
    })
}
