//! Symmetric convex bodies described by their Minkowski gauge.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum BodyKind {
    /// `radius * B_r^n`, the scaled unit `l^r` ball; `exponent` may be `inf`.
    LpBall { exponent: f64, radius: f64 },
    /// `{x : <x, A^{-1} x> <= 1}`.
    Ellipsoid(DMatrix<f64>),
}

/// A symmetric convex body `K`, usable through `||x||_K = inf{r > 0 : x in rK}`.
#[derive(Debug, Clone)]
pub struct BodySpec {
    kind: BodyKind,
    dim: usize,
    chol: Option<Cholesky<f64, Dyn>>,
}

impl BodySpec {
    pub fn lp_ball(dim: usize, exponent: f64, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("body dimension must be >= 1".into()));
        }
        if !(exponent >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "l^r ball exponent must lie in [1, inf], got {exponent}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind: BodyKind::LpBall { exponent, radius },
            dim,
            chol: None,
        })
    }

    pub fn euclidean_ball(dim: usize) -> Self {
        Self::lp_ball(dim, 2.0, 1.0).expect("unit ball is valid")
    }

    pub fn cube(dim: usize) -> Self {
        Self::lp_ball(dim, f64::INFINITY, 1.0).expect("unit cube is valid")
    }

    pub fn cross_polytope(dim: usize) -> Self {
        Self::lp_ball(dim, 1.0, 1.0).expect("unit cross-polytope is valid")
    }

    pub fn ellipsoid(matrix: DMatrix<f64>) -> Result<Self> {
        let dim = matrix.nrows();
        if !matrix.is_square() || dim == 0 {
            return Err(Error::NotPositiveDefinite("ellipsoid matrix is not square".into()));
        }
        if (&matrix - matrix.transpose()).amax() > 1e-12 * matrix.amax().max(1.0) {
            return Err(Error::NotPositiveDefinite(
                "ellipsoid matrix is not symmetric".into(),
            ));
        }
        let chol = Cholesky::new(matrix.clone())
            .ok_or_else(|| Error::NotPositiveDefinite("ellipsoid matrix".into()))?;
        Ok(Self {
            kind: BodyKind::Ellipsoid(matrix),
            dim,
            chol: Some(chol),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    /// `||x||_K`.
    pub fn gauge(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::LpBall { exponent, radius } => lp_norm(x, *exponent) / radius,
            BodyKind::Ellipsoid(_) => {
                let v = DVector::from_column_slice(x);
                let w = self.chol.as_ref().expect("ellipsoid keeps its factor").solve(&v);
                v.dot(&w).max(0.0).sqrt()
            }
        }
    }

    /// Support function `h_K(x) = sup_{y in K} <x, y>`, i.e. the gauge of the
    /// polar body.
    pub fn support(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::LpBall { exponent, radius } => {
                let dual = if *exponent == 1.0 {
                    f64::INFINITY
                } else if exponent.is_infinite() {
                    1.0
                } else {
                    exponent / (exponent - 1.0)
                };
                radius * lp_norm(x, dual)
            }
            BodyKind::Ellipsoid(a) => {
                let v = DVector::from_column_slice(x);
                (v.dot(&(a * &v))).max(0.0).sqrt()
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Exact volume where an elementary closed form exists.
    pub fn volume(&self) -> Option<f64> {
        let n = self.dim as i32;
        let unit_ball = match self.dim {
            1 => 2.0,
            2 => PI,
            3 => 4.0 * PI / 3.0,
            _ => return None,
        };
        match &self.kind {
            BodyKind::LpBall { exponent, radius } => {
                let base = if exponent.is_infinite() {
                    2f64.powi(n)
                } else if *exponent == 1.0 {
                    2f64.powi(n) / (1..=n).map(f64::from).product::<f64>()
                } else if *exponent == 2.0 {
                    unit_ball
                } else {
                    return None;
                };
                Some(base * radius.powi(n))
            }
            BodyKind::Ellipsoid(a) => Some(unit_ball * a.determinant().sqrt()),
        }
    }
}

fn lp_norm(x: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        x.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if r == 1.0 {
        x.iter().map(|v| v.abs()).sum()
    } else if r == 2.0 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        x.iter().map(|v| v.abs().powf(r)).sum::<f64>().powf(1.0 / r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauges() {
        let disk = BodySpec::euclidean_ball(1);
        assert_eq!(disk.gauge(&[3.0]), 3.0);
        let sq = BodySpec::lp_ball(2, f64::INFINITY, 2.0).unwrap();
        assert_eq!(sq.gauge(&[2.0, 1.0]), 1.0);
        let ell = BodySpec::ellipsoid(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0])))
            .unwrap();
        assert!((ell.gauge(&[0.0, 2.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gauge_is_even_and_homogeneous() {
        let bodies = [
            BodySpec::lp_ball(2, 1.5, 0.7).unwrap(),
            BodySpec::cross_polytope(2),
            BodySpec::ellipsoid(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 0.5])).unwrap(),
        ];
        for b in &bodies {
            for x in [[0.3, -1.2], [2.0, 0.1], [-0.4, -0.4]] {
                let g = b.gauge(&x);
                assert!(g > 0.0);
                assert!((b.gauge(&[-x[0], -x[1]]) - g).abs() < 1e-14);
                assert!((b.gauge(&[3.0 * x[0], 3.0 * x[1]]) - 3.0 * g).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn support_is_polar_gauge() {
        // <x, y> <= h_K(x) ||y||_K, tight on the boundary.
        let b = BodySpec::lp_ball(2, 3.0, 1.3).unwrap();
        let x = [0.8, -0.3];
        let mut best = f64::NEG_INFINITY;
        for k in 0..20000 {
            let t = k as f64 / 20000.0 * std::f64::consts::TAU;
            let y = [t.cos(), t.sin()];
            let g = b.gauge(&y);
            best = best.max((x[0] * y[0] + x[1] * y[1]) / g);
        }
        assert!((best - b.support(&x)).abs() < 1e-6);
    }

    #[test]
    fn volumes() {
        assert!((BodySpec::euclidean_ball(2).volume().unwrap() - PI).abs() < 1e-15);
        assert_eq!(BodySpec::cube(3).volume().unwrap(), 8.0);
        assert_eq!(BodySpec::cross_polytope(2).volume().unwrap(), 2.0);
        assert!(BodySpec::lp_ball(2, 3.0, 1.0).unwrap().volume().is_none());
    }

    #[test]
    fn rejects_bad_bodies() {
        assert!(BodySpec::lp_ball(2, 0.5, 1.0).is_err());
        assert!(BodySpec::lp_ball(2, 2.0, 0.0).is_err());
        assert!(BodySpec::ellipsoid(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0])).is_err());
    }
}
