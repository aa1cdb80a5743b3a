use std::f64::consts::PI;

use crate::body::BodySpec;
use crate::contract::{contract_axis, LogKernel};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::legendre::TRIM_NATS;
use crate::logquad::LogQuad;
use crate::quadrature::integrate_log;

/// Default spacing of the outer x-grid.
const OUTER_SPACING: f64 = 0.2;

/// `M_r(K) = |K| int (avg_K e^{r<x,y>})^{-1/r} dx`.
///
/// `K` is sampled on the nodes of `grid` with gauge `<= 1`, each counting
/// one cell. The outer grid spans `(TRIM_NATS + 5) / inradius` per axis at
/// spacing 0.2, where the inradius is measured on the sampled nodes.
pub fn lr_volume_product(body: &BodySpec, r: f64, grid: &GridSpec) -> Result<LogQuad> {
    let nodes = body_nodes(body, grid)?;
    let rho = sampled_inradius(&nodes, grid.dim());
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter("sampled body has empty interior".into()));
    }
    let half = (TRIM_NATS + 5.0) / rho;
    let points = 2 * (half / OUTER_SPACING).ceil() as usize + 1;
    let outer = GridSpec::new(grid.dim(), half, points)?;
    lr_volume_product_with(body, r, grid, &outer)
}

/// [`lr_volume_product`] on an explicit outer grid.
pub fn lr_volume_product_with(body: &BodySpec, r: f64, grid: &GridSpec, outer: &GridSpec) -> Result<LogQuad> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    grid.ensure_dim(body.dim())?;
    outer.ensure_dim(body.dim())?;
    let count = body_nodes(body, grid)?.len();
    let log_vol = (count as f64).ln() + grid.cell_volume().ln();

    let mut field: Vec<f64> = (0..grid.len())
        .map(|i| if body.contains(&grid.node(i)) { 0.0 } else { f64::NEG_INFINITY })
        .collect();
    let mut shape = grid.shape().to_vec();
    for k in 0..grid.dim() {
        let y = grid.axis_coords(k);
        let x = outer.axis_coords(k);
        let w = grid.spacing(k).ln();
        let kernel = LogKernel::from_fn(x.len(), y.len(), |o, i| r * x[o] * y[i] + w);
        let (out, out_shape) = contract_axis(&field, &shape, k, &kernel);
        field = out;
        shape = out_shape;
    }
    let integrand: Vec<f64> = field.iter().map(|l| -(l - log_vol) / r).collect();
    let q = integrate_log(outer, &integrand);
    Ok(LogQuad {
        log_abs: q.log_abs + log_vol,
        ..q
    })
}

fn body_nodes(body: &BodySpec, grid: &GridSpec) -> Result<Vec<Vec<f64>>> {
    grid.ensure_dim(body.dim())?;
    let nodes: Vec<Vec<f64>> = (0..grid.len())
        .map(|i| grid.node(i))
        .filter(|x| body.contains(x))
        .collect();
    if nodes.is_empty() {
        return Err(Error::EmptyDensity);
    }
    Ok(nodes)
}

/// `min_u max_{y in nodes} <u, y>` over a fixed set of unit directions.
fn sampled_inradius(nodes: &[Vec<f64>], dim: usize) -> f64 {
    directions(dim)
        .iter()
        .map(|u| {
            nodes
                .iter()
                .map(|y| u.iter().zip(y).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn directions(dim: usize) -> Vec<Vec<f64>> {
    match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..720)
            .map(|k| {
                let a = k as f64 * PI / 360.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci sphere, padded with zeros past three axes
            let m = 2000;
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..m)
                .map(|k| {
                    let z = 1.0 - 2.0 * (k as f64 + 0.5) / m as f64;
                    let rr = (1.0 - z * z).sqrt();
                    let a = golden * k as f64;
                    let mut u = vec![0.0; dim];
                    u[0] = rr * a.cos();
                    u[1] = rr * a.sin();
                    u[2] = z;
                    u
                })
                .collect()
        }
    }
}
