use rayon::prelude::*;

use crate::contract::{contract_all_with_edges, LogKernel};
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::exponents::{conjugate, log_c_s, ExponentSchedule};
use crate::grid::{axis_log_trapezoid_weights, GridSpec};
use crate::heatflow::fp_evolve;
use crate::legendre::{default_dual_points, with_one_spacing, DualGrid, TRIM_NATS};
use crate::logquad::{log_sum_exp, LogQuad};
use crate::quadrature::{integrate_log, log_lq_norm, Measure};

use super::revhc::ou_power_integral;

/// `log F(x) = log int exp(scale <x, z> - power phi(z)) dz` on an x-grid.
#[derive(Debug, Clone)]
pub struct LaplaceField {
    grid: GridSpec,
    log_values: Vec<f64>,
    /// Nodes whose dominant `z` sits on the edge of the input grid.
    flagged: Vec<bool>,
}

impl LaplaceField {
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn flagged(&self) -> &[bool] {
        &self.flagged
    }

    pub fn flagged_count(&self) -> usize {
        self.flagged.iter().filter(|&&b| b).count()
    }

    /// As a density (`phi = -log F`).
    pub fn to_density(&self) -> Result<LogDensity> {
        LogDensity::new(self.grid.clone(), self.log_values.iter().map(|v| -v).collect())
    }

    /// `log int F^q dx`. The tail ratio also covers the share of the
    /// integral carried by flagged nodes.
    pub fn power_integral(&self, q: f64) -> LogQuad {
        let integrand: Vec<f64> = self.log_values.iter().map(|v| q * v).collect();
        let total = integrate_log(&self.grid, &integrand);
        let bad = log_sum_exp(
            integrand
                .iter()
                .zip(&self.flagged)
                .filter(|(_, &f)| f)
                .map(|(&v, _)| v + self.grid.cell_volume().ln()),
        );
        let share = if bad == f64::NEG_INFINITY || total.is_zero() {
            0.0
        } else {
            (bad - total.log_abs).exp()
        };
        LogQuad {
            tail_ratio: total.tail_ratio.max(share),
            ..total
        }
    }
}

fn laplace_field(f: &LogDensity, scale: f64, power: f64, x_grid: &GridSpec) -> Result<LaplaceField> {
    let zg = f.grid();
    x_grid.ensure_dim(zg.dim())?;
    let field: Vec<f64> = f
        .phi()
        .iter()
        .map(|&p| if p == f64::INFINITY { f64::NEG_INFINITY } else { -power * p })
        .collect();
    let kernels: Vec<LogKernel> = (0..zg.dim())
        .map(|k| {
            let z = zg.axis_coords(k);
            let x = x_grid.axis_coords(k);
            let w = axis_log_trapezoid_weights(z.len(), zg.spacing(k));
            LogKernel::from_fn(x.len(), z.len(), |o, i| scale * x[o] * z[i] + w[i])
        })
        .collect();
    let (field, flagged) = contract_all_with_edges(&field, zg.shape(), &kernels);
    Ok(LaplaceField {
        grid: x_grid.clone(),
        log_values: field,
        flagged,
    })
}

/// `F(x) = int e^{<x,z>/p} f_t(z)^{1/p} dz` with the endpoint `p` of `s`.
pub fn laplace_f_t(f_t: &LogDensity, s: f64, x_grid: &GridSpec) -> Result<LaplaceField> {
    let p = ExponentSchedule::endpoint(s)?.p;
    laplace_field(f_t, 1.0 / p, 1.0 / p, x_grid)
}

/// `Lf(x) = int e^{<x,z>} f(z) dz`.
pub fn laplace_transform(f: &LogDensity, x_grid: &GridSpec) -> Result<LaplaceField> {
    laplace_field(f, 1.0, 1.0, x_grid)
}

/// Common x-grid for `int F^q` over several inputs (`F` built with equal
/// scale and power, so the dominant `z` at `x` has slope `x`).
///
/// Starts from the slope range of every input, then trims each axis to where
/// `q log F` is within [`TRIM_NATS`] of its maximum, plus one spacing.
pub fn laplace_grid(fs: &[LogDensity], power: f64, q: f64) -> Result<GridSpec> {
    let first = fs.first().ok_or_else(|| Error::InvalidParameter("no densities".into()))?;
    let dim = first.dim();
    let points: Vec<usize> = first.grid().shape().iter().map(|&n| default_dual_points(n, dim)).collect();
    let mut half = vec![0.0f64; dim];
    for f in fs {
        let g = DualGrid::slope_range(f, &points)?;
        for (k, h) in half.iter_mut().enumerate() {
            *h = h.max(g.grid().half_width(k));
        }
    }
    let wide = GridSpec::from_axes(&half, &points)?;
    let mut extent = vec![0.0f64; dim];
    for f in fs {
        let field = laplace_field(f, power, power, &wide)?;
        let vals: Vec<f64> = field.log_values.iter().map(|v| q * v).collect();
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (i, &v) in vals.iter().enumerate() {
            if v >= max - TRIM_NATS {
                for (k, x) in wide.node(i).iter().enumerate() {
                    extent[k] = extent[k].max(x.abs());
                }
            }
        }
    }
    let trimmed: Vec<f64> = (0..dim)
        .map(|k| {
            let h = wide.spacing(k);
            with_one_spacing((extent[k] + h).max(2.0 * h), points[k]).min(half[k])
        })
        .collect();
    GridSpec::from_axes(&trimmed, &points)
}

/// `Q_s(t) = log int F_t^q dx` on a grid shared by all times.
///
/// `t = 0` uses `f0` itself. Times must be ascending and nonnegative.
pub fn q_functional(f0: &LogDensity, s: f64, times: &[f64]) -> Result<Vec<(f64, LogQuad)>> {
    let e = ExponentSchedule::endpoint(s)?;
    if times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("times must be ascending and nonnegative".into()));
    }
    let fts: Vec<LogDensity> = times
        .par_iter()
        .map(|&t| if t == 0.0 { Ok(f0.clone()) } else { fp_evolve(f0, t) })
        .collect::<Result<_>>()?;
    let grid = laplace_grid(&fts, 1.0 / e.p, e.q)?;
    fts.par_iter()
        .zip(times)
        .map(|(ft, &t)| Ok((t, q_value(ft, s, &grid)?)))
        .collect()
}

/// `log int F_t^q dx` for one density on a given x-grid.
pub fn q_value(f_t: &LogDensity, s: f64, x_grid: &GridSpec) -> Result<LogQuad> {
    let e = ExponentSchedule::endpoint(s)?;
    Ok(laplace_f_t(f_t, s, x_grid)?.power_integral(e.q))
}

/// Both sides of the dual-route identity, as logs:
/// `int (P_s g)^q dgamma` with `g = (f_t/gamma)^{1/p}` (OU route) and
/// `C_s^q e^{ns} int F_t^q dx` (Laplace route).
pub fn equiv_form_check(f_t: &LogDensity, s: f64) -> Result<(LogQuad, LogQuad)> {
    let e = ExponentSchedule::endpoint(s)?;
    let ou = ou_power_integral(f_t, s, e.p, e.q)?;
    let grid = laplace_grid(std::slice::from_ref(f_t), 1.0 / e.p, e.q)?;
    let q = q_value(f_t, s, &grid)?;
    let n = f_t.dim() as f64;
    let shift = e.q * log_c_s(&e, f_t.dim()) + n * s;
    let laplace = LogQuad {
        log_abs: q.log_abs + shift,
        ..q
    };
    Ok((ou, laplace))
}

/// `log ||Lf||_{L^q} - log ||f||_{L^p}` with `q = p/(p-1)`, `p` in `(0,1)`.
pub fn laplace_norm_ratio(f: &LogDensity, p: f64) -> Result<LogQuad> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0, 1), got {p}")));
    }
    let q = conjugate(p);
    let grid = laplace_grid(std::slice::from_ref(f), 1.0, q)?;
    let lf = laplace_transform(f, &grid)?;
    let top = lf.power_integral(q).powf(1.0 / q);
    let bottom = log_lq_norm(f, p, Measure::Lebesgue)?;
    Ok(LogQuad {
        log_abs: top.log_abs - bottom.log_abs,
        sign: 1,
        tail_ratio: top.tail_ratio.max(bottom.tail_ratio),
    })
}
