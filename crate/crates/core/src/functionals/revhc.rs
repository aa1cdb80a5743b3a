use std::f64::consts::PI;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::heatflow::ou_apply_flagged;
use crate::logquad::LogQuad;
use crate::logquad::log_sum_exp;
use crate::quadrature::{integrate_log, log_integral, Measure};

/// Both sides of the reverse hypercontractive inequality, in logs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevHCReport {
    /// `log ||P_s[(f0/gamma)^{1/p}]||_{L^q(gamma)}`
    pub log_lhs: LogQuad,
    /// `(1/p) log int f0 dx`
    pub log_rhs: LogQuad,
    /// `log_lhs - log_rhs`
    pub slack: f64,
}

fn check_exponents(s: f64, p: f64, q: f64) -> Result<()> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::InvalidParameter(format!("s must be positive, got {s}")));
    }
    if !(p > 0.0 && p.is_finite()) || !(q < 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("need p > 0 > q, got p = {p}, q = {q}")));
    }
    Ok(())
}

/// `log int (P_s[(f0/gamma)^{1/p}])^q dgamma`.
///
/// The tail ratio also covers the share of the integral carried by nodes
/// where the OU average is dominated by the edge of the box.
pub fn ou_power_integral(f0: &LogDensity, s: f64, p: f64, q: f64) -> Result<LogQuad> {
    check_exponents(s, p, q)?;
    let grid = f0.grid();
    let half_log = 0.5 * grid.dim() as f64 * (2.0 * PI).ln();
    let r2 = grid.squared_norms();
    let phi_g: Vec<f64> = f0
        .phi()
        .iter()
        .zip(&r2)
        .map(|(&phi, &r2)| (phi - 0.5 * r2 - half_log) / p)
        .collect();
    let (pg, flagged) = ou_apply_flagged(&f0.with_phi(phi_g)?, s)?;
    let integrand: Vec<f64> = pg
        .phi()
        .iter()
        .zip(&r2)
        .map(|(&phi, &r2)| -q * phi - 0.5 * r2 - half_log)
        .collect();
    let total = integrate_log(grid, &integrand);
    let bad = log_sum_exp(
        integrand
            .iter()
            .zip(&flagged)
            .filter(|(_, &f)| f)
            .map(|(&v, _)| v + grid.cell_volume().ln()),
    );
    let share = if bad == f64::NEG_INFINITY || total.is_zero() {
        0.0
    } else {
        (bad - total.log_abs).exp()
    };
    Ok(LogQuad {
        tail_ratio: total.tail_ratio.max(share),
        ..total
    })
}

/// Evaluates `||P_s[(f0/gamma)^{1/p}]||_{L^q(gamma)}` against
/// `(int f0 dx)^{1/p}` on the grid of `f0`.
pub fn rev_hc_value(f0: &LogDensity, s: f64, p: f64, q: f64) -> Result<RevHCReport> {
    let integral = ou_power_integral(f0, s, p, q)?;
    let log_lhs = integral.powf(1.0 / q);
    let mass = log_integral(f0, Measure::Lebesgue);
    let log_rhs = mass.powf(1.0 / p);
    Ok(RevHCReport {
        log_lhs,
        log_rhs,
        slack: log_lhs.log_abs - log_rhs.log_abs,
    })
}

/// Closed form of `||P_s[(gamma_beta(. + a)/gamma)^{1/p}]||_{L^q(gamma)}`;
/// the input has unit mass, so this is also the normalized ratio.
///
/// Divergence of the inner integral gives `+inf`; divergence of the outer
/// one gives `0`. Both come back flagged as divergent.
pub fn gaussian_rev_hc(beta: f64, shift: &[f64], s: f64, p: f64, q: f64) -> Result<LogQuad> {
    if !(beta > 0.0) || shift.is_empty() {
        return Err(Error::InvalidParameter(format!("need beta > 0 and a shift vector, got beta = {beta}")));
    }
    if !(s > 0.0) || p == 0.0 || q == 0.0 {
        return Err(Error::InvalidParameter(format!("need s > 0 and nonzero p, q; got s = {s}, p = {p}, q = {q}")));
    }
    let v = -(-2.0 * s).exp_m1();
    let lam = (-s).exp();
    let a_coef = 1.0 / v - (1.0 - 1.0 / beta) / p;
    if !(a_coef > 0.0) {
        return Ok(LogQuad::infinite());
    }
    let alpha = lam * lam / v - lam * lam / (v * v * a_coef);
    let d = q * alpha + 1.0;
    if !(d > 0.0) {
        return Ok(LogQuad::divergent_zero());
    }
    let l2pi = (2.0 * PI).ln();
    let total: f64 = shift
        .iter()
        .map(|&a| {
            // log P_s g(x) = -alpha x^2 / 2 + mu x + kappa
            let mu = -lam * a / (v * p * beta * a_coef);
            let kappa = a * a / (2.0 * a_coef * p * p * beta * beta)
                - a * a / (2.0 * p * beta)
                - beta.ln() / (2.0 * p)
                - 0.5 * (2.0 * PI * v).ln()
                + 0.5 * (2.0 * PI / a_coef).ln();
            let log_int = 0.5 * (l2pi - d.ln()) + (q * mu).powi(2) / (2.0 * d) + q * kappa - 0.5 * l2pi;
            log_int / q
        })
        .sum();
    Ok(LogQuad::exact(total))
}
