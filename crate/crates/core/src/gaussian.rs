//! Centered Gaussians `c * gamma_A`.

use nalgebra::{Cholesky, DMatrix, Dyn};

use crate::error::{Error, Result};

/// `c * gamma_A` with `gamma_A(x) = det(2 pi A)^{-1/2} exp(-<x, A^{-1} x>/2)`.
#[derive(Debug, Clone)]
pub struct GaussianSpec {
    mass: f64,
    covariance: DMatrix<f64>,
    chol: Cholesky<f64, Dyn>,
}

impl GaussianSpec {
    pub fn new(mass: f64, covariance: DMatrix<f64>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Gaussian mass must be positive, got {mass}"
            )));
        }
        if !covariance.is_square() || covariance.nrows() == 0 {
            return Err(Error::NotPositiveDefinite("covariance is not square".into()));
        }
        let scale = covariance.amax().max(1.0);
        if (&covariance - covariance.transpose()).amax() > 1e-12 * scale {
            return Err(Error::NotPositiveDefinite(
                "covariance is not symmetric".into(),
            ));
        }
        let chol = Cholesky::new(covariance.clone()).ok_or_else(|| {
            Error::NotPositiveDefinite("covariance has a nonpositive eigenvalue".into())
        })?;
        Ok(Self {
            mass,
            covariance,
            chol,
        })
    }

    /// Standard Gaussian in `dim` dimensions.
    pub fn standard(dim: usize) -> Self {
        Self::isotropic(1.0, 1.0, dim).expect("identity covariance is valid")
    }

    /// `c * gamma_beta`, covariance `beta * id`.
    pub fn isotropic(mass: f64, beta: f64, dim: usize) -> Result<Self> {
        Self::new(mass, DMatrix::identity(dim, dim) * beta)
    }

    pub fn diagonal(mass: f64, variances: &[f64]) -> Result<Self> {
        Self::new(
            mass,
            DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(variances)),
        )
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    /// `log det(2 pi A)`.
    pub fn log_det_2pi_cov(&self) -> f64 {
        let n = self.dim() as f64;
        let l = self.chol.l();
        let log_det: f64 = (0..self.dim()).map(|i| 2.0 * l[(i, i)].ln()).sum();
        n * (2.0 * std::f64::consts::PI).ln() + log_det
    }

    /// `<x, A^{-1} x>`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(x);
        let w = self.chol.solve(&v);
        v.dot(&w)
    }

    /// `-log(c * gamma_A(x))`.
    pub fn neg_log_density(&self, x: &[f64]) -> f64 {
        0.5 * self.quadratic(x) + 0.5 * self.log_det_2pi_cov() - self.mass.ln()
    }
}
