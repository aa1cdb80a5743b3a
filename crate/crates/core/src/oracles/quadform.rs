use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::logquad::LogQuad;

/// `exp(-<x, M x>/2 + <b, x> - c0)` on `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticForm {
    pub m: DMatrix<f64>,
    pub b: Option<DVector<f64>>,
    pub c0: f64,
}

impl QuadraticForm {
    pub fn new(m: DMatrix<f64>, b: Option<DVector<f64>>, c0: f64) -> Result<Self> {
        if !m.is_square() || m.nrows() == 0 {
            return Err(Error::InvalidParameter("form matrix must be square".into()));
        }
        let scale = m.amax().max(1.0);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidParameter("form matrix must be symmetric".into()));
        }
        if let Some(b) = &b {
            if b.len() != m.nrows() {
                return Err(Error::DimensionMismatch {
                    expected: m.nrows(),
                    found: b.len(),
                });
            }
        }
        Ok(Self { m, b, c0 })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }
}

/// `log int exp(-<x,Mx>/2 + <b,x> - c0) dx
///  = (d/2) log 2pi - (1/2) log det M + <b, M^{-1} b>/2 - c0`.
///
/// A nonpositive eigenvalue makes the integral diverge; the result is then
/// [`LogQuad::infinite`].
pub fn gaussian_form_integral(qf: &QuadraticForm) -> LogQuad {
    let eig = SymmetricEigen::new(qf.m.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return LogQuad::infinite();
    }
    let d = qf.dim() as f64;
    let log_det: f64 = eig.eigenvalues.iter().map(|l| l.ln()).sum();
    let quad = match &qf.b {
        Some(b) => {
            // M^{-1} b in the eigenbasis
            let coeffs = eig.eigenvectors.transpose() * b;
            coeffs
                .iter()
                .zip(eig.eigenvalues.iter())
                .map(|(c, l)| c * c / l)
                .sum::<f64>()
        }
        None => 0.0,
    };
    LogQuad::exact(0.5 * d * (2.0 * PI).ln() - 0.5 * log_det + 0.5 * quad - qf.c0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn standard_two_dimensional() {
        let qf = QuadraticForm::new(DMatrix::identity(2, 2), None, 0.0).unwrap();
        assert!((gaussian_form_integral(&qf).value() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn indefinite_diverges() {
        let qf = QuadraticForm::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])), None, 0.0)
            .unwrap();
        let r = gaussian_form_integral(&qf);
        assert!(r.is_infinite() && r.is_divergent());
    }

    #[test]
    fn completed_square() {
        // int exp(-x^2 + x) = sqrt(pi) e^{1/4}
        let qf = QuadraticForm::new(
            DMatrix::from_element(1, 1, 2.0),
            Some(DVector::from_element(1, 1.0)),
            0.0,
        )
        .unwrap();
        let exact = PI.sqrt() * 0.25f64.exp();
        assert!((gaussian_form_integral(&qf).value() - exact).abs() < 1e-12);
    }

    #[test]
    fn invariant_under_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let a = DMatrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
            let m = &a * a.transpose() + DMatrix::identity(3, 3) * 0.5;
            let b = DVector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
            let u = a.clone().qr().q();
            let base = gaussian_form_integral(&QuadraticForm::new(m.clone(), Some(b.clone()), 0.3).unwrap());
            let mr = u.transpose() * &m * &u;
            let mr = (&mr + mr.transpose()) * 0.5;
            let rotated =
                gaussian_form_integral(&QuadraticForm::new(mr, Some(u.transpose() * b), 0.3).unwrap());
            assert!((base.log_abs - rotated.log_abs).abs() < 1e-10);
        }
    }
}
