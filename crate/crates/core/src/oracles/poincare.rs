//! Brascamp-Lieb variance inequality and matrix Cramer-Rao bound on grids.
//!
//! Everything here is linear-domain rectangle-rule summation over interior
//! nodes, with derivatives by centered differences.

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

struct Interior {
    nodes: Vec<usize>,
    weights: Vec<f64>,
    hessians: Vec<DMatrix<f64>>,
    mass: f64,
}

fn offset(grid: &GridSpec, flat: usize, moves: &[(usize, isize)]) -> usize {
    let mut idx = grid.multi_index(flat);
    for &(k, d) in moves {
        idx[k] = (idx[k] as isize + d) as usize;
    }
    grid.flat_index(&idx)
}

fn hessian(grid: &GridSpec, phi: &[f64], flat: usize) -> DMatrix<f64> {
    let n = grid.dim();
    let at = |moves: &[(usize, isize)]| phi[offset(grid, flat, moves)];
    DMatrix::from_fn(n, n, |a, b| {
        let (ha, hb) = (grid.spacing(a), grid.spacing(b));
        if a == b {
            (at(&[(a, 1)]) - 2.0 * phi[flat] + at(&[(a, -1)])) / (ha * ha)
        } else {
            (at(&[(a, 1), (b, 1)]) - at(&[(a, 1), (b, -1)]) - at(&[(a, -1), (b, 1)])
                + at(&[(a, -1), (b, -1)]))
                / (4.0 * ha * hb)
        }
    })
}

/// Interior nodes whose full 3^n stencil is finite, with normalized
/// weights and checked Hessians.
fn interior(h: &LogDensity) -> Result<Interior> {
    let grid = h.grid();
    let phi = h.phi();
    let n = grid.dim();
    let stencil_ok = |flat: usize| {
        if grid.is_boundary(flat) {
            return false;
        }
        let base = grid.multi_index(flat);
        (0..3usize.pow(n as u32)).all(|code| {
            let mut c = code;
            let idx: Vec<usize> = base
                .iter()
                .map(|&i| {
                    let d = c % 3;
                    c /= 3;
                    i + d - 1
                })
                .collect();
            phi[grid.flat_index(&idx)].is_finite()
        })
    };
    let nodes: Vec<usize> = (0..grid.len()).filter(|&i| stencil_ok(i)).collect();
    if nodes.is_empty() {
        return Err(Error::EmptyDensity);
    }
    let floor = nodes.iter().map(|&i| phi[i]).fold(f64::INFINITY, f64::min);
    let cell = grid.cell_volume();
    let weights: Vec<f64> = nodes.iter().map(|&i| (floor - phi[i]).exp() * cell).collect();
    let mass = weights.iter().sum();
    let mut hessians = Vec::with_capacity(nodes.len());
    for &i in &nodes {
        let m = hessian(grid, phi, i);
        if Cholesky::new(m.clone()).is_none() {
            return Err(Error::HessianNotPositive {
                node: grid.multi_index(i),
                coords: grid.node(i),
            });
        }
        hessians.push(m);
    }
    Ok(Interior {
        nodes,
        weights,
        hessians,
        mass,
    })
}

fn gradient(grid: &GridSpec, g: &[f64], flat: usize) -> DVector<f64> {
    DVector::from_fn(grid.dim(), |k, _| {
        (g[offset(grid, flat, &[(k, 1)])] - g[offset(grid, flat, &[(k, -1)])]) / (2.0 * grid.spacing(k))
    })
}

/// `(Var_h(g), int <grad g, (Hess -log h)^{-1} grad g> dh / m(h))`.
pub fn pbl_check(h: &LogDensity, g: &[f64]) -> Result<(f64, f64)> {
    let grid = h.grid();
    if g.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            found: g.len(),
        });
    }
    let it = interior(h)?;
    let mut mean = 0.0;
    let mut second = 0.0;
    let mut dirichlet = 0.0;
    for ((&i, &w), hess) in it.nodes.iter().zip(&it.weights).zip(&it.hessians) {
        mean += w * g[i];
        second += w * g[i] * g[i];
        let grad = gradient(grid, g, i);
        let solved = Cholesky::new(hess.clone())
            .expect("checked positive definite")
            .solve(&grad);
        dirichlet += w * grad.dot(&solved);
    }
    mean /= it.mass;
    Ok((second / it.mass - mean * mean, dirichlet / it.mass))
}

/// `(cov(h)^{-1}, int Hess(-log h) dh / m(h))`; the bound says the second
/// minus the first is positive semidefinite.
pub fn cramer_rao_check(h: &LogDensity) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let grid = h.grid();
    let n = grid.dim();
    let it = interior(h)?;
    let mut mean = DVector::zeros(n);
    for (&i, &w) in it.nodes.iter().zip(&it.weights) {
        mean += DVector::from_vec(grid.node(i)) * w;
    }
    mean /= it.mass;
    let mut cov = DMatrix::zeros(n, n);
    let mut hess = DMatrix::zeros(n, n);
    for ((&i, &w), hm) in it.nodes.iter().zip(&it.weights).zip(&it.hessians) {
        let d = DVector::from_vec(grid.node(i)) - &mean;
        cov += &d * d.transpose() * w;
        hess += hm * w;
    }
    cov /= it.mass;
    hess /= it.mass;
    let inv = cov
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite("covariance is singular".into()))?;
    Ok((inv, hess))
}

/// `z -> exp(<x, z>/p) f(z)^{1/p}` (unnormalized), the tilted measure whose
/// normalizer is the Laplace-route function at `x`.
pub fn tilt(f: &LogDensity, p: f64, x: &[f64]) -> Result<LogDensity> {
    f.grid().ensure_dim(x.len())?;
    if !(p > 0.0) {
        return Err(Error::InvalidParameter(format!("tilt exponent must be positive, got {p}")));
    }
    let grid = f.grid();
    let phi = (0..grid.len())
        .map(|i| {
            let z = grid.node(i);
            let dot: f64 = x.iter().zip(&z).map(|(a, b)| a * b).sum();
            (f.phi()[i] - dot) / p
        })
        .collect();
    f.with_phi(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gaussian_to_logdensity;
    use crate::gaussian::GaussianSpec;
    use crate::grid::make_grid;

    fn min_eig(m: &DMatrix<f64>) -> f64 {
        let s = (m + m.transpose()) * 0.5;
        s.symmetric_eigenvalues().min()
    }

    #[test]
    fn linear_test_function_under_gaussian_is_equality() {
        let grid = make_grid(1, 8.0, 257).unwrap();
        let h = gaussian_to_logdensity(&GaussianSpec::standard(1), &grid).unwrap();
        let g: Vec<f64> = grid.axis_coords(0);
        let (var, dir) = pbl_check(&h, &g).unwrap();
        assert!((var - 1.0).abs() < 1e-9);
        assert!((dir - 1.0).abs() < 1e-9);
    }

    #[test]
    fn quadratic_test_function_under_gaussian() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let h = gaussian_to_logdensity(&GaussianSpec::standard(1), &grid).unwrap();
        let g: Vec<f64> = grid.axis_coords(0).iter().map(|x| x * x).collect();
        let (var, dir) = pbl_check(&h, &g).unwrap();
        assert!((var - 2.0).abs() < 1e-6);
        assert!((dir - 4.0).abs() < 1e-3);
    }

    #[test]
    fn quartic_density_satisfies_variance_bound() {
        let grid = make_grid(1, 4.0, 513).unwrap();
        let h = LogDensity::from_fn(grid.clone(), |x| x[0].powi(4) + x[0] * x[0]).unwrap();
        let (var, dir) = pbl_check(&h, &grid.axis_coords(0)).unwrap();
        assert!(dir - var >= -1e-6 * dir);
    }

    #[test]
    fn gaussian_cramer_rao_is_tight() {
        let grid = make_grid(2, 8.0, 129).unwrap();
        for beta in [0.5, 2.0] {
            let h = gaussian_to_logdensity(&GaussianSpec::isotropic(1.0, beta, 2).unwrap(), &grid).unwrap();
            let (inv, hess) = cramer_rao_check(&h).unwrap();
            assert!((&hess - DMatrix::identity(2, 2) / beta).amax() < 1e-9);
            assert!((&hess - &inv).amax() < 1e-6);
        }
    }

    #[test]
    fn non_gaussian_cramer_rao_gap_is_psd() {
        let grid = make_grid(1, 4.0, 513).unwrap();
        let h = LogDensity::from_fn(grid, |x| x[0].powi(4) + 0.5 * x[0] * x[0]).unwrap();
        let (inv, hess) = cramer_rao_check(&h).unwrap();
        assert!(min_eig(&(hess - inv)) >= -1e-8);
    }

    #[test]
    fn concave_bump_is_rejected() {
        let grid = make_grid(1, 3.0, 61).unwrap();
        let h = LogDensity::from_fn(grid, |x| (x[0] * x[0] - 1.0).powi(2)).unwrap();
        assert!(matches!(cramer_rao_check(&h), Err(Error::HessianNotPositive { .. })));
    }
}
