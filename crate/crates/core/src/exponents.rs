//! Exponent pairs attached to an Ornstein-Uhlenbeck time `s`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Hoelder conjugate `p' = p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Endpoint exponents `p = 1 - e^{-2s}`, `q = 1 - e^{2s}` for a time `s > 0`.
///
/// The pair is mutually conjugate, `1/p + 1/q = 1`, and
/// `c1 = 1/p`, `c2 = 1/q'` are the powers carried by the two inputs of the
/// associated two-function Gaussian-kernel integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentSchedule {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
}

impl ExponentSchedule {
    pub fn endpoint(s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time s must be positive, got {s}"
            )));
        }
        let p = -(-2.0 * s).exp_m1();
        let q = -(2.0 * s).exp_m1();
        Ok(Self {
            s,
            p,
            q,
            c1: 1.0 / p,
            c2: 1.0 / conjugate(q),
        })
    }

    /// Nelson threshold at this time for a given `p`.
    pub fn nelson_q(&self, p: f64) -> f64 {
        nelson_q(self.s, p)
    }

    /// `1 - e^{-2s}`, the variance of the OU kernel at time `s`.
    pub fn kernel_variance(&self) -> f64 {
        -(-2.0 * self.s).exp_m1()
    }
}

/// `q(s, p) = 1 + e^{2s} (p - 1)`.
pub fn nelson_q(s: f64, p: f64) -> f64 {
    1.0 + (2.0 * s).exp() * (p - 1.0)
}

/// `log C_{s,p,q}` with
/// `C_{s,p,q} = ((2 pi)^{(1/p + 1/q')/2 - 1} / sqrt(1 - e^{-2s}))^n`.
pub fn log_c_spq(s: f64, p: f64, q: f64, dim: usize) -> f64 {
    let inv_qc = 1.0 / conjugate(q);
    let v = -(-2.0 * s).exp_m1();
    dim as f64 * ((0.5 * (1.0 / p + inv_qc) - 1.0) * (2.0 * PI).ln() - 0.5 * v.ln())
}

/// `log C_s` at the endpoint exponents.
pub fn log_c_s(sched: &ExponentSchedule, dim: usize) -> f64 {
    log_c_spq(sched.s, sched.p, sched.q, dim)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn half_log_two() {
        let e = ExponentSchedule::endpoint(0.5 * 2f64.ln()).unwrap();
        assert!((e.p - 0.5).abs() < 1e-15);
        assert!((e.q + 1.0).abs() < 1e-15);
        assert!((e.c1 - 2.0).abs() < 1e-14);
        assert!((e.c2 - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nelson_threshold_values() {
        assert!(nelson_q(0.5 * 2f64.ln(), 0.5).abs() < 1e-15);
        assert!((nelson_q(1.0, 0.9) - (1.0 - 0.1 * 1f64.exp().powi(2))).abs() < 1e-14);
        assert!((nelson_q(1.0, 0.9) - 0.261_094_390_9).abs() < 1e-9);
        for s in [0.1, 0.7, 2.0] {
            let e = ExponentSchedule::endpoint(s).unwrap();
            assert!(e.nelson_q(e.p).abs() < 1e-12);
            assert!(e.nelson_q(e.p) > e.q);
        }
    }

    #[test]
    fn rejects_nonpositive_time() {
        assert!(ExponentSchedule::endpoint(0.0).is_err());
        assert!(ExponentSchedule::endpoint(-1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn endpoint_exponents_are_conjugate(s in 1e-3f64..3.0) {
            let e = ExponentSchedule::endpoint(s).unwrap();
            prop_assert!(0.0 < e.p && e.p < 1.0 && e.q < 0.0);
            prop_assert!((e.q - conjugate(e.p)).abs() < 1e-12 * e.q.abs().max(1.0));
            prop_assert!((1.0 / e.p + 1.0 / e.q - 1.0).abs() < 1e-12);
            prop_assert!((e.c1 - e.c2).abs() < 1e-9 * e.c1);
        }
    }
}
