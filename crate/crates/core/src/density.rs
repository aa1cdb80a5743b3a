//! Nonnegative functions on a grid, stored as `phi = -log f`.

use crate::body::BodySpec;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSpec;
use crate::grid::GridSpec;

/// A nonnegative function `f = exp(-phi)` sampled on a [`GridSpec`].
///
/// `phi` may hold `+inf` where `f` vanishes. `-inf` and NaN are rejected, and
/// at least one node must be finite. `even` is set at construction when
/// `phi(x) == phi(-x)` holds bitwise at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDensity {
    grid: GridSpec,
    phi: Vec<f64>,
    even: bool,
}

impl LogDensity {
    pub fn new(grid: GridSpec, phi: Vec<f64>) -> Result<Self> {
        if phi.len() != grid.len() {
            return Err(Error::InvalidDensity(format!(
                "{} values for a grid of {} nodes",
                phi.len(),
                grid.len()
            )));
        }
        if let Some(i) = phi.iter().position(|v| v.is_nan()) {
            return Err(Error::InvalidDensity(format!("NaN at node {i}")));
        }
        if let Some(i) = phi.iter().position(|&v| v == f64::NEG_INFINITY) {
            return Err(Error::InvalidDensity(format!(
                "-inf potential (f = +inf) at node {i}"
            )));
        }
        if phi.iter().all(|v| v.is_infinite()) {
            return Err(Error::EmptyDensity);
        }
        let even = max_odd_part(&grid, &phi) == 0.0;
        Ok(Self { grid, phi, even })
    }

    /// Samples `phi` at every node.
    pub fn from_fn(grid: GridSpec, phi: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| phi(&grid.node(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn into_phi(self) -> Vec<f64> {
        self.phi
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    /// `log f` at every node (`-inf` where `f = 0`).
    pub fn log_values(&self) -> Vec<f64> {
        self.phi.iter().map(|&v| -v).collect()
    }

    /// `f` at every node.
    pub fn values(&self) -> Vec<f64> {
        self.phi.iter().map(|&v| (-v).exp()).collect()
    }

    /// `c * f` for `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be positive, got {c}"
            )));
        }
        let lc = c.ln();
        Self::new(self.grid.clone(), self.phi.iter().map(|&v| v - lc).collect())
    }

    /// `f^a` for `a > 0`.
    pub fn power(&self, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "exponent must be positive, got {a}"
            )));
        }
        Self::new(self.grid.clone(), self.phi.iter().map(|&v| a * v).collect())
    }

    /// Number of nodes with `f > 0`.
    pub fn support_size(&self) -> usize {
        self.phi.iter().filter(|v| v.is_finite()).count()
    }

    /// Same grid, new `phi`.
    pub fn with_phi(&self, phi: Vec<f64>) -> Result<Self> {
        Self::new(self.grid.clone(), phi)
    }
}

/// Largest `|phi(x) - phi(-x)|` over nodes; `inf` vs `inf` counts as equal,
/// finite vs `inf` as an infinite mismatch.
fn max_odd_part(grid: &GridSpec, phi: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..phi.len() {
        let j = grid.mirror(i);
        if j < i {
            continue;
        }
        let (a, b) = (phi[i], phi[j]);
        let d = if a == b { 0.0 } else { (a - b).abs() };
        worst = worst.max(d);
    }
    worst
}

/// True iff `max |phi(x) - phi(-x)| <= tol`, with `inf == inf` allowed.
pub fn check_even(f: &LogDensity, tol: f64) -> bool {
    max_odd_part(&f.grid, &f.phi) <= tol
}

/// `phi(x) = <x, A^{-1} x>/2 + log det(2 pi A)/2 - log c`.
pub fn gaussian_to_logdensity(g: &GaussianSpec, grid: &GridSpec) -> Result<LogDensity> {
    grid.ensure_dim(g.dim())?;
    LogDensity::from_fn(grid.clone(), |x| g.neg_log_density(x))
}

/// `phi(x) = ||x||_K^2 / 2`.
pub fn body_to_logdensity(body: &BodySpec, grid: &GridSpec) -> Result<LogDensity> {
    grid.ensure_dim(body.dim())?;
    LogDensity::from_fn(grid.clone(), |x| {
        let g = body.gauge(x);
        0.5 * g * g
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use nalgebra::{DMatrix, DVector};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_values_at_nodes() {
        let grid = make_grid(1, 8.0, 257).unwrap();
        let f = gaussian_to_logdensity(&GaussianSpec::standard(1), &grid).unwrap();
        assert!((f.phi()[128] - 0.5 * (2.0 * PI).ln()).abs() < 1e-15);
        assert!((f.phi()[128] - 0.918_938_533_204_672_7).abs() < 1e-15);
        assert!(f.is_even());

        let g2 = GaussianSpec::isotropic(2.0, 1.0, 1).unwrap();
        let f2 = gaussian_to_logdensity(&g2, &grid).unwrap();
        assert!((f2.phi()[128] - (0.5 * (2.0 * PI).ln() - 2f64.ln())).abs() < 1e-15);

        let g4 = GaussianSpec::isotropic(1.0, 4.0, 1).unwrap();
        let f4 = gaussian_to_logdensity(&g4, &grid).unwrap();
        // x = 2 is node 128 + 32
        assert_eq!(grid.coord(0, 160), 2.0);
        assert!((f4.phi()[160] - (0.5 + 0.5 * (8.0 * PI).ln())).abs() < 1e-14);
    }

    #[test]
    fn gaussian_roundtrip_matches_analytic_density() {
        let grid = make_grid(2, 4.0, 33).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[1.5, 0.4, 0.4, 0.8]);
        let g = GaussianSpec::new(0.7, a.clone()).unwrap();
        let f = gaussian_to_logdensity(&g, &grid).unwrap();
        let ainv = a.clone().try_inverse().unwrap();
        let norm = 0.7 / ((2.0 * PI).powi(2) * a.determinant()).sqrt();
        for (i, v) in f.values().iter().enumerate() {
            let x = DVector::from_vec(grid.node(i));
            let exact = norm * (-0.5 * x.dot(&(&ainv * &x))).exp();
            assert!(((v - exact) / exact).abs() < 1e-12);
        }
    }

    #[test]
    fn body_potentials() {
        let g1 = make_grid(1, 4.0, 9).unwrap();
        let f = body_to_logdensity(&BodySpec::euclidean_ball(1), &g1).unwrap();
        assert_eq!(g1.coord(0, 7), 3.0);
        assert_eq!(f.phi()[7], 4.5);

        let g2 = make_grid(2, 2.0, 5).unwrap();
        let cube = BodySpec::lp_ball(2, f64::INFINITY, 2.0).unwrap();
        let f = body_to_logdensity(&cube, &g2).unwrap();
        let at = g2.flat_index(&[4, 3]);
        assert_eq!(g2.node(at), vec![2.0, 1.0]);
        assert_eq!(f.phi()[at], 0.5);

        let ell =
            BodySpec::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0])))
                .unwrap();
        let f = body_to_logdensity(&ell, &g2).unwrap();
        let at = g2.flat_index(&[2, 4]);
        assert_eq!(g2.node(at), vec![0.0, 2.0]);
        assert!((f.phi()[at] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn evenness_checks() {
        let grid = make_grid(1, 4.0, 65).unwrap();
        let gauss = gaussian_to_logdensity(&GaussianSpec::standard(1), &grid).unwrap();
        assert!(check_even(&gauss, 0.0));
        let tilted = LogDensity::from_fn(grid.clone(), |x| 0.5 * x[0] * x[0] + x[0]).unwrap();
        assert!(!check_even(&tilted, 1e-6));
        assert!(!tilted.is_even());
        let boxed = LogDensity::from_fn(grid.clone(), |x| {
            if x[0].abs() <= 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .unwrap();
        assert!(check_even(&boxed, 0.0));
        assert!(boxed.is_even());
    }

    #[test]
    fn rejects_invalid_values() {
        let grid = make_grid(1, 1.0, 3).unwrap();
        assert_eq!(
            LogDensity::new(grid.clone(), vec![f64::INFINITY; 3]),
            Err(Error::EmptyDensity)
        );
        assert!(LogDensity::new(grid.clone(), vec![0.0, f64::NAN, 0.0]).is_err());
        assert!(LogDensity::new(grid.clone(), vec![0.0, f64::NEG_INFINITY, 0.0]).is_err());
        assert!(LogDensity::new(grid, vec![0.0, 0.0]).is_err());
    }
}
