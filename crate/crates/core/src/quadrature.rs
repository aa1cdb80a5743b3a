//! Tensor-trapezoid integration carried out entirely in log space.

use std::f64::consts::PI;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::logquad::{log_sum_exp_slice, LogQuad};

/// Reference measure for integrals and norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    Lebesgue,
    /// `gamma(x) dx` with `gamma(x) = (2 pi)^{-n/2} exp(-|x|^2/2)`.
    StandardGaussian,
}

impl Measure {
    /// Log of the density of the measure at every node.
    pub fn log_weights(&self, grid: &GridSpec) -> Vec<f64> {
        match self {
            Measure::Lebesgue => vec![0.0; grid.len()],
            Measure::StandardGaussian => {
                let c = 0.5 * grid.dim() as f64 * (2.0 * PI).ln();
                grid.squared_norms().iter().map(|r2| -0.5 * r2 - c).collect()
            }
        }
    }
}

/// Integrates `exp(log_integrand)` over `grid` with the tensor trapezoid rule.
///
/// `tail_ratio` compares the largest integrand value on the outer face of the
/// box with the largest interior value.
pub fn integrate_log(grid: &GridSpec, log_integrand: &[f64]) -> LogQuad {
    debug_assert_eq!(grid.len(), log_integrand.len());
    let weights = grid.log_trapezoid_weights();
    let terms: Vec<f64> = log_integrand
        .iter()
        .zip(&weights)
        .map(|(&v, &w)| if v == f64::NEG_INFINITY { v } else { v + w })
        .collect();
    let total = log_sum_exp_slice(&terms);
    if total == f64::NEG_INFINITY {
        return LogQuad::zero();
    }
    LogQuad::positive(total, tail_ratio(grid, log_integrand))
}

/// `max_boundary f / max_interior f` for `f = exp(log_integrand)`.
pub fn tail_ratio(grid: &GridSpec, log_integrand: &[f64]) -> f64 {
    let (mut edge, mut interior) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (i, &v) in log_integrand.iter().enumerate() {
        if grid.is_boundary(i) {
            edge = edge.max(v);
        } else {
            interior = interior.max(v);
        }
    }
    if edge == f64::NEG_INFINITY {
        0.0
    } else if interior == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (edge - interior).exp()
    }
}

/// `log int f dmu`.
pub fn log_integral(f: &LogDensity, m: Measure) -> LogQuad {
    let w = m.log_weights(f.grid());
    let integrand: Vec<f64> = f.phi().iter().zip(&w).map(|(&p, &w)| w - p).collect();
    integrate_log(f.grid(), &integrand)
}

/// `log ||f||_{L^q(mu)} = (1/q) log int f^q dmu` for any `q != 0`.
///
/// For `q < 0`, nodes where `f = 0` are dropped from the integral (treated as
/// a null set); their presence raises `tail_ratio` to at least `1`.
pub fn log_lq_norm(f: &LogDensity, q: f64, m: Measure) -> Result<LogQuad> {
    if q == 0.0 || !q.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "norm exponent must be finite and nonzero, got {q}"
        )));
    }
    let w = m.log_weights(f.grid());
    let mut excluded = false;
    let integrand: Vec<f64> = f
        .phi()
        .iter()
        .zip(&w)
        .map(|(&p, &w)| {
            if p == f64::INFINITY {
                excluded |= q < 0.0;
                f64::NEG_INFINITY
            } else {
                w - q * p
            }
        })
        .collect();
    let integral = integrate_log(f.grid(), &integrand);
    if integral.is_zero() {
        return Ok(LogQuad::zero());
    }
    let mut out = LogQuad::positive(integral.log_abs / q, integral.tail_ratio);
    if excluded {
        out.tail_ratio = out.tail_ratio.max(1.0);
    }
    Ok(out)
}
