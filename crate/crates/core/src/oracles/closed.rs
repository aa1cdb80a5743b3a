//! Hand-derived closed forms; derivations are in `docs/math-notes.md`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::logquad::LogQuad;

pub const CLOSED_FORM_NAMES: &[&str] = &[
    "v_gamma",
    "gaussian_volume_product",
    "polar_mass_gaussian",
    "fp_variance_law",
    "lq_norm_gamma",
    "laplace_norm_gamma",
    "laplace_gamma_ratio",
    "c_s",
    "bl_constant_endpoint",
];

fn get(params: &BTreeMap<String, f64>, key: &str) -> Result<f64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| Error::MissingParameter(key.to_string()))
}

fn dim(params: &BTreeMap<String, f64>) -> Result<f64> {
    let n = params.get("n").copied().unwrap_or(1.0);
    if n < 1.0 || n.fract() != 0.0 {
        return Err(Error::InvalidParameter(format!("dimension must be a positive integer, got {n}")));
    }
    Ok(n)
}

/// Log-value of a named closed form.
///
/// | name | params | value |
/// |---|---|---|
/// | `v_gamma` | n | `(2 pi)^n` |
/// | `gaussian_volume_product` | n (c, beta ignored) | `(2 pi)^n` |
/// | `polar_mass_gaussian` | c, n | `int (c gamma_beta)° = (2 pi)^n / c` |
/// | `fp_variance_law` | beta, t | `1 - e^{-2t} + e^{-2t} beta` |
/// | `lq_norm_gamma` | p, beta, n | `norm of gamma_beta in L^p(dx)` |
/// | `laplace_norm_gamma` | q, n | `norm of exp(x^2/2) in L^q(dx)`, `q < 0` |
/// | `laplace_gamma_ratio` | p, n | `laplace_norm_gamma(p') / lq_norm_gamma(p, 1)` |
/// | `c_s` | s, n | `(2 pi)^{n(1/p-1)} p^{-n/2}` at the endpoint |
/// | `bl_constant_endpoint` | s, n | `(2 pi)^{n(1-1/p)} p^{n/2}` |
pub fn gaussian_closed_forms(name: &str, params: &BTreeMap<String, f64>) -> Result<LogQuad> {
    let l2pi = (2.0 * PI).ln();
    let log = match name {
        "v_gamma" | "gaussian_volume_product" => dim(params)? * l2pi,
        "polar_mass_gaussian" => dim(params)? * l2pi - get(params, "c")?.ln(),
        "fp_variance_law" => {
            let (beta, t) = (get(params, "beta")?, get(params, "t")?);
            let e = (-2.0 * t).exp();
            (1.0 - e + e * beta).ln()
        }
        "lq_norm_gamma" => {
            let (p, beta, n) = (get(params, "p")?, get(params, "beta")?, dim(params)?);
            // int gamma_beta^p = (2 pi beta)^{(1-p)/2} p^{-1/2}
            n * ((1.0 - p) / (2.0 * p) * (2.0 * PI * beta).ln() - p.ln() / (2.0 * p))
        }
        "laplace_norm_gamma" => {
            let (q, n) = (get(params, "q")?, dim(params)?);
            if q >= 0.0 {
                return Err(Error::InvalidParameter("laplace_norm_gamma needs q < 0".into()));
            }
            n * (2.0 * PI / -q).ln() / (2.0 * q)
        }
        "laplace_gamma_ratio" => {
            let (p, n) = (get(params, "p")?, dim(params)?);
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
            }
            let q = p / (p - 1.0);
            n * ((2.0 * PI / -q).ln() / (2.0 * q) + (0.5 - 0.5 / p) * l2pi + p.ln() / (2.0 * p))
        }
        "c_s" | "bl_constant_endpoint" => {
            let (s, n) = (get(params, "s")?, dim(params)?);
            let p = -(-2.0 * s).exp_m1();
            let log_c = n * ((1.0 / p - 1.0) * l2pi - 0.5 * p.ln());
            if name == "c_s" {
                log_c
            } else {
                -log_c
            }
        }
        other => return Err(Error::UnknownClosedForm(other.to_string())),
    };
    Ok(LogQuad::exact(log))
}
