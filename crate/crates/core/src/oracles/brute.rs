use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::legendre::DualGrid;

/// Node budget per grid for [`brute_legendre`].
pub const BRUTE_MAX_NODES: usize = 1 << 14;

/// All-pairs discrete conjugate `max_i [<x_j, y_i> - phi(y_i)]`.
///
/// Each candidate is accumulated as `x_0 y_0 - phi + x_1 y_1 + ...`, axis by
/// axis, so that any evaluation with that association (in particular the
/// separable transform) can be compared bitwise.
pub fn brute_legendre(f: &LogDensity, dual: &DualGrid) -> Result<LogDensity> {
    let (pg, dg) = (f.grid(), dual.grid());
    dg.ensure_dim(f.dim())?;
    if pg.len() > BRUTE_MAX_NODES || dg.len() > BRUTE_MAX_NODES {
        return Err(Error::SizeGuard(format!(
            "{} primal and {} dual nodes; limit {BRUTE_MAX_NODES} each",
            pg.len(),
            dg.len()
        )));
    }
    let ys: Vec<(Vec<f64>, f64)> = (0..pg.len())
        .filter(|&i| f.phi()[i].is_finite())
        .map(|i| (pg.node(i), f.phi()[i]))
        .collect();
    let out = (0..dg.len())
        .map(|j| {
            let x = dg.node(j);
            ys.iter()
                .map(|(y, p)| {
                    x.iter()
                        .zip(y)
                        .skip(1)
                        .fold(x[0] * y[0] - p, |acc, (a, b)| acc + a * b)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    LogDensity::new(dg.clone(), out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::legendre::legendre_transform;

    #[test]
    fn quadratic_samples() {
        let g = make_grid(1, 4.0, 65).unwrap();
        let f = LogDensity::from_fn(g, |y| 0.5 * y[0] * y[0]).unwrap();
        let dual = DualGrid::new(make_grid(1, 2.0, 17).unwrap());
        let c = brute_legendre(&f, &dual).unwrap();
        for (i, v) in c.phi().iter().enumerate() {
            let x = dual.grid().coord(0, i);
            assert!((v - 0.5 * x * x).abs() <= 0.5 * 0.125f64.powi(2) + 1e-15);
        }
    }

    #[test]
    fn single_finite_node_gives_affine_conjugate() {
        let g = make_grid(2, 1.0, 5).unwrap();
        let target = g.flat_index(&[3, 1]);
        let y0 = g.node(target);
        let phi: Vec<f64> = (0..g.len()).map(|i| if i == target { 0.7 } else { f64::INFINITY }).collect();
        let f = LogDensity::new(g, phi).unwrap();
        let dual = DualGrid::new(make_grid(2, 3.0, 7).unwrap());
        let c = brute_legendre(&f, &dual).unwrap();
        for (j, v) in c.phi().iter().enumerate() {
            let x = dual.grid().node(j);
            assert_eq!(*v, x[0] * y0[0] - 0.7 + x[1] * y0[1]);
        }
    }

    #[test]
    fn bitwise_equal_to_separable_transform_in_two_dimensions() {
        let g = make_grid(2, 2.0, 33).unwrap();
        let f = LogDensity::from_fn(g, |y| (y[0] - 0.3 * y[1]).powi(2) + y[1].abs().powf(1.5) + (2.0 * y[0]).sin())
            .unwrap();
        let dual = DualGrid::new(make_grid(2, 3.0, 41).unwrap());
        let fast = legendre_transform(&f, &dual).unwrap();
        let slow = brute_legendre(&f, &dual).unwrap();
        for (a, b) in fast.phi().iter().zip(slow.phi()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn size_guard() {
        let g = make_grid(2, 1.0, 129).unwrap();
        let f = LogDensity::new(g.clone(), vec![0.0; g.len()]).unwrap();
        assert!(matches!(brute_legendre(&f, &DualGrid::new(g)), Err(Error::SizeGuard(_))));
    }
}
