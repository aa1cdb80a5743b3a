//! Named even test densities.

use std::fmt;

use crate::density::{gaussian_to_logdensity, LogDensity};
use crate::error::{Error, Result};
use crate::gaussian::GaussianSpec;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// Indicator of `[-1, 1]^n`.
    Box,
    /// `exp(-|x|^alpha)`, Euclidean norm.
    PowerExp(f64),
    /// `(N(-1, 1) + N(1, 1)) / 2` per coordinate; log-concave.
    Mixture,
    /// `exp(-min(0.75 x1^2 + 6 x2^2, 6 x1^2 + 0.75 x2^2))`; 2D only, not
    /// log-concave.
    Cross,
    /// `gamma_beta`.
    Gaussian(f64),
}

impl Family {
    pub fn build(&self, grid: &GridSpec) -> Result<LogDensity> {
        match *self {
            Family::Box => LogDensity::from_fn(grid.clone(), |x| {
                if x.iter().all(|v| v.abs() <= 1.0) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
            Family::PowerExp(alpha) => {
                if !(alpha > 0.0) {
                    return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
                }
                LogDensity::from_fn(grid.clone(), |x| {
                    x.iter().map(|v| v * v).sum::<f64>().powf(0.5 * alpha)
                })
            }
            Family::Mixture => LogDensity::from_fn(grid.clone(), |x| {
                // -log of ((e^{-(x-1)^2/2} + e^{-(x+1)^2/2}) / 2) / sqrt(2 pi)
                x.iter()
                    .map(|&v| 0.5 * v * v + 0.5 - log_cosh(v) + 0.5 * (2.0 * std::f64::consts::PI).ln())
                    .sum()
            }),
            Family::Cross => {
                if grid.dim() != 2 {
                    return Err(Error::DimensionMismatch {
                        expected: 2,
                        found: grid.dim(),
                    });
                }
                LogDensity::from_fn(grid.clone(), |x| {
                    let (a, b) = (x[0] * x[0], x[1] * x[1]);
                    (0.75 * a + 6.0 * b).min(6.0 * a + 0.75 * b)
                })
            }
            Family::Gaussian(beta) => {
                gaussian_to_logdensity(&GaussianSpec::isotropic(1.0, beta, grid.dim())?, grid)
            }
        }
    }

    /// Parses `box`, `exp1.5` (any alpha), `mixture`, `cross`, `gauss2`
    /// (any beta) and `gauss` (beta 1).
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown density family `{s}`"));
        match s {
            "box" => Ok(Family::Box),
            "mixture" => Ok(Family::Mixture),
            "cross" => Ok(Family::Cross),
            "gauss" => Ok(Family::Gaussian(1.0)),
            _ => {
                if let Some(a) = s.strip_prefix("exp") {
                    a.parse().map(Family::PowerExp).map_err(|_| bad())
                } else if let Some(b) = s.strip_prefix("gauss") {
                    b.parse().map(Family::Gaussian).map_err(|_| bad())
                } else {
                    Err(bad())
                }
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Box => write!(f, "box"),
            Family::PowerExp(a) => write!(f, "exp{a}"),
            Family::Mixture => write!(f, "mixture"),
            Family::Cross => write!(f, "cross"),
            Family::Gaussian(b) => write!(f, "gauss{b}"),
        }
    }
}

fn log_cosh(v: f64) -> f64 {
    let a = v.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// The one-dimensional battery: box, `exp(-|x|^alpha)` for
/// alpha in {1, 1.5, 3, 4}, and the mixture.
pub fn battery_1d() -> Vec<Family> {
    vec![
        Family::Box,
        Family::PowerExp(1.0),
        Family::PowerExp(1.5),
        Family::PowerExp(3.0),
        Family::PowerExp(4.0),
        Family::Mixture,
    ]
}

/// Two-dimensional battery members.
pub fn battery_2d() -> Vec<Family> {
    vec![Family::Cross]
}
