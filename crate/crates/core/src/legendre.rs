//! Discrete Legendre-Fenchel transform, polar functions and convex envelopes.
//!
//! The conjugate is taken over grid nodes only:
//! `phi*(x_j) = max_i [<x_j, y_i> - phi(y_i)]`. In one dimension this is
//! evaluated with a lower-hull sweep whose result is bitwise equal to the
//! all-pairs maximum; higher dimensions apply the sweep axis by axis.

use rayon::prelude::*;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Sublevel depth (in nats above the minimum of `phi*`) kept by
/// [`DualGrid::for_density`]; `exp(-40)` is below every tolerance we use.
pub const TRIM_NATS: f64 = 40.0;

/// Grid for the slope variable of a conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct DualGrid {
    grid: GridSpec,
}

/// Default number of dual nodes per axis for a primal axis with `n` nodes.
pub fn default_dual_points(n: usize, dim: usize) -> usize {
    if dim == 1 {
        4 * (n - 1) + 1
    } else {
        2 * (n - 1) + 1
    }
}

impl DualGrid {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Half-width per axis = largest finite-difference slope of `phi` plus
    /// one dual spacing.
    ///
    /// When `phi` jumps to `+inf` next to a finite node the slope range is
    /// unbounded; the half-width is then chosen so that `phi*` has grown by
    /// [`TRIM_NATS`] at the edge.
    pub fn slope_range(f: &LogDensity, points: &[usize]) -> Result<Self> {
        let grid = f.grid();
        if points.len() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: points.len(),
            });
        }
        let half: Vec<f64> = (0..grid.dim())
            .map(|k| {
                let s = axis_slope_bound(f, k);
                with_one_spacing(s, points[k])
            })
            .collect();
        Ok(Self::new(GridSpec::from_axes(&half, points)?))
    }

    /// [`DualGrid::slope_range`] followed by trimming each axis to the
    /// bounding box of `{phi* <= min phi* + TRIM_NATS}` (plus one spacing).
    /// Used wherever `f°` is integrated.
    pub fn for_density(f: &LogDensity) -> Result<Self> {
        let points: Vec<usize> = f
            .grid()
            .shape()
            .iter()
            .map(|&n| default_dual_points(n, f.dim()))
            .collect();
        Self::trimmed(f, &points)
    }

    pub fn trimmed(f: &LogDensity, points: &[usize]) -> Result<Self> {
        let wide = Self::slope_range(f, points)?;
        let conj = legendre_transform(f, &wide)?;
        let g = wide.grid();
        let min = conj.phi().iter().copied().fold(f64::INFINITY, f64::min);
        let mut extent = vec![0.0f64; g.dim()];
        for (i, &v) in conj.phi().iter().enumerate() {
            if v <= min + TRIM_NATS {
                for (k, x) in g.node(i).iter().enumerate() {
                    extent[k] = extent[k].max(x.abs());
                }
            }
        }
        let half: Vec<f64> = (0..g.dim())
            .map(|k| {
                // one provisional spacing of margin, never wider than before
                let e = (extent[k] + g.spacing(k)).max(2.0 * g.spacing(k));
                with_one_spacing(e, points[k]).min(g.half_width(k))
            })
            .collect();
        Ok(Self::new(GridSpec::from_axes(&half, points)?))
    }
}

/// `R` such that `R = s + 2R/(m - 1)`, i.e. `s` plus one spacing of an
/// `m`-node grid on `[-R, R]`.
pub(crate) fn with_one_spacing(s: f64, m: usize) -> f64 {
    s * (m - 1) as f64 / (m as f64 - 3.0).max(1.0)
}

fn axis_slope_bound(f: &LogDensity, axis: usize) -> f64 {
    let grid = f.grid();
    let phi = f.phi();
    let h = grid.spacing(axis);
    let stride = grid.stride(axis);
    let n = grid.points(axis);
    let mut slope = 0.0f64;
    let mut unbounded = false;
    for i in 0..phi.len() {
        let idx = (i / stride) % n;
        if idx + 1 == n {
            continue;
        }
        let (a, b) = (phi[i], phi[i + stride]);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => slope = slope.max((b - a).abs() / h),
            (true, false) | (false, true) => unbounded = true,
            _ => {}
        }
    }
    if unbounded {
        let (mut lo, mut hi, mut reach) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for (i, &v) in phi.iter().enumerate() {
            if v.is_finite() {
                lo = lo.min(v);
                hi = hi.max(v);
                let idx = (i / stride) % n;
                reach = reach.max(grid.coord(axis, idx).abs());
            }
        }
        if reach > 0.0 {
            slope = slope.max((TRIM_NATS + (hi - lo)) / reach);
        }
    }
    if slope > 0.0 {
        slope
    } else {
        h
    }
}

/// One-dimensional conjugate `max_i [x_j y_i - phi_i]` at every `x_j`.
///
/// `y` and `x` must be ascending. Entries of `phi` equal to `+inf` are
/// ignored; an all-`+inf` input is rejected.
pub fn legendre_1d(y: &[f64], phi: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    if y.len() != phi.len() {
        return Err(Error::InvalidParameter(format!(
            "{} abscissae for {} values",
            y.len(),
            phi.len()
        )));
    }
    if phi.iter().all(|v| *v == f64::INFINITY) {
        return Err(Error::EmptyDensity);
    }
    if phi.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
        return Err(Error::InvalidDensity("conjugate input must lie in (-inf, +inf]".into()));
    }
    Ok(conjugate_line(y, phi, x))
}

/// Sweep over the lower convex hull. Returns `-inf` everywhere for an empty
/// line (empty supremum).
pub(crate) fn conjugate_line(y: &[f64], phi: &[f64], x: &[f64]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = y
        .iter()
        .zip(phi)
        .filter(|(_, v)| v.is_finite())
        .map(|(&a, &b)| (a, b))
        .collect();
    if pts.is_empty() {
        return vec![f64::NEG_INFINITY; x.len()];
    }
    let ymax = pts.iter().fold(0.0f64, |m, p| m.max(p.0.abs()));
    let pmax = pts.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let xmax = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // Points closer than this to the supporting line may win the float max
    // through rounding, so the hull keeps them.
    let tol = 32.0 * f64::EPSILON * (xmax * ymax + pmax + 1.0);

    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let chord = a.1 + (p.1 - a.1) * (b.0 - a.0) / (p.0 - a.0);
            if b.1 - chord > tol {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }

    let value = |j: usize, xv: f64| xv * hull[j].0 - hull[j].1;
    let mut out = Vec::with_capacity(x.len());
    let mut k = 0usize;
    for &xv in x {
        while k + 1 < hull.len() && value(k + 1, xv) >= value(k, xv) {
            k += 1;
        }
        let mut best = value(k, xv);
        let mut arg = k;
        let mut j = k + 1;
        while j < hull.len() {
            let v = value(j, xv);
            if v < best - tol {
                break;
            }
            if v > best {
                best = v;
                arg = j;
            }
            j += 1;
        }
        let mut j = k;
        while j > 0 {
            j -= 1;
            let v = value(j, xv);
            if v < best - tol {
                break;
            }
            if v > best {
                best = v;
                arg = j;
            }
        }
        k = arg;
        out.push(best);
    }
    out
}

/// Applies `w <- max_{y_k} [x_k y_k + w]` along each axis in turn, starting
/// from `w = -phi`. `phi_field` must be laid out over `primal`.
fn conjugate_field(phi_field: &[f64], primal: &GridSpec, dual: &GridSpec) -> Vec<f64> {
    let mut shape = primal.shape().to_vec();
    let mut w: Vec<f64> = phi_field.iter().map(|&v| -v).collect();
    for axis in 0..primal.dim() {
        let y = primal.axis_coords(axis);
        let x = dual.axis_coords(axis);
        let outer: usize = shape[..axis].iter().product();
        let inner: usize = shape[axis + 1..].iter().product();
        let (n_in, n_out) = (shape[axis], x.len());
        let lines: Vec<Vec<f64>> = (0..outer * inner)
            .into_par_iter()
            .map(|line| {
                let (a, b) = (line / inner, line % inner);
                let phi_line: Vec<f64> = (0..n_in)
                    .map(|i| -w[(a * n_in + i) * inner + b])
                    .collect();
                conjugate_line(&y, &phi_line, &x)
            })
            .collect();
        let mut next = vec![f64::NEG_INFINITY; outer * n_out * inner];
        for (line, vals) in lines.into_iter().enumerate() {
            let (a, b) = (line / inner, line % inner);
            for (o, v) in vals.into_iter().enumerate() {
                next[(a * n_out + o) * inner + b] = v;
            }
        }
        shape[axis] = n_out;
        w = next;
    }
    w
}

/// Exact discrete conjugate of `phi` on the dual grid.
pub fn legendre_transform(f: &LogDensity, dual: &DualGrid) -> Result<LogDensity> {
    dual.grid().ensure_dim(f.dim())?;
    let conj = conjugate_field(f.phi(), f.grid(), dual.grid());
    LogDensity::new(dual.grid().clone(), conj)
}

/// `f°(x) = inf_y exp(-<x,y>) / f(y) = exp(-phi*(x))`.
///
/// Volume-product bounds need `f` even; callers should check
/// [`LogDensity::is_even`].
pub fn polar_density(f: &LogDensity, dual: &DualGrid) -> Result<LogDensity> {
    legendre_transform(f, dual)
}

/// Largest convex minorant of the sampled `phi`, via `phi**` on the original
/// grid. The intermediate dual grid spans the full slope range with four
/// times the primal resolution.
pub fn convex_envelope(f: &LogDensity) -> Result<LogDensity> {
    let points: Vec<usize> = f.grid().shape().iter().map(|&n| 4 * (n - 1) + 1).collect();
    let dual = DualGrid::slope_range(f, &points)?;
    let conj = legendre_transform(f, &dual)?;
    let back = DualGrid::new(f.grid().clone());
    legendre_transform(&conj, &back)
}
