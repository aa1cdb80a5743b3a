use std::f64::consts::PI;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::exponents::{conjugate, ExponentSchedule};
use crate::logquad::{log_sum_exp, LogQuad};
use crate::oracles::{gaussian_form_integral, QuadraticForm};

/// Data of the two-function inverse Brascamp-Lieb integral
/// `int exp(-pi <x, Q x>) f1(x1)^{c1} f2(x2)^{c2} dx`, `x = (x1, x2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BLData {
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub c1: f64,
    pub c2: f64,
    /// `2n x 2n`, symmetric.
    pub qform: DMatrix<f64>,
}

impl BLData {
    /// Exponents `p, q` at OU time `s` in dimension `n`; `c1 = 1/p`,
    /// `c2 = 1/q'`.
    pub fn new(s: f64, p: f64, q: f64, n: usize) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) || n == 0 {
            return Err(Error::InvalidParameter(format!("need s > 0 and n >= 1, got s = {s}, n = {n}")));
        }
        if !(p > 0.0) || !(q < 0.0) {
            return Err(Error::InvalidParameter(format!("need p > 0 > q, got p = {p}, q = {q}")));
        }
        let v = -(-2.0 * s).exp_m1();
        let lam = (-s).exp();
        let d11 = 1.0 - v / p;
        let d22 = lam * lam * (1.0 - (-(2.0 * s).exp_m1()) / q);
        let k = 1.0 / (2.0 * PI * v);
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            m[(i, i)] = k * d11;
            m[(n + i, n + i)] = k * d22;
            m[(i, n + i)] = -k * lam;
            m[(n + i, i)] = -k * lam;
        }
        Ok(Self {
            s,
            p,
            q,
            c1: 1.0 / p,
            c2: 1.0 / conjugate(q),
            qform: m,
        })
    }

    /// Endpoint exponents of `s`.
    pub fn endpoint(s: f64, n: usize) -> Result<Self> {
        let e = ExponentSchedule::endpoint(s)?;
        Self::new(s, e.p, e.q, n)
    }

    pub fn dim(&self) -> usize {
        self.qform.nrows() / 2
    }
}

/// `log int exp(-pi <x,Qx>) f1^{c1} f2^{c2}` on the product of the two grids,
/// as a nested log-sum-exp. The tail ratio compares pairs with either node on
/// its grid's outer face against interior pairs.
pub fn bl_integral(f1: &LogDensity, f2: &LogDensity, data: &BLData) -> Result<LogQuad> {
    let n = data.dim();
    f1.grid().ensure_dim(n)?;
    f2.grid().ensure_dim(n)?;
    let (g1, g2) = (f1.grid(), f2.grid());
    let q = &data.qform;
    let xs: Vec<Vec<f64>> = (0..g1.len()).map(|i| g1.node(i)).collect();
    let ys: Vec<Vec<f64>> = (0..g2.len()).map(|j| g2.node(j)).collect();
    let quad = |z: &[f64], off: usize| -> f64 {
        let mut acc = 0.0;
        for a in 0..n {
            for b in 0..n {
                acc += z[a] * q[(off + a, off + b)] * z[b];
            }
        }
        acc
    };
    let y_terms: Vec<f64> = (0..g2.len())
        .map(|j| {
            let phi = f2.phi()[j];
            if phi == f64::INFINITY {
                f64::NEG_INFINITY
            } else {
                -PI * quad(&ys[j], n) - data.c2 * phi + g2.log_trapezoid_weight(j)
            }
        })
        .collect();
    // (log sum over interior pairs, log sum over edge pairs, max interior, max edge)
    let rows: Vec<[f64; 4]> = (0..g1.len())
        .into_par_iter()
        .map(|i| {
            let phi = f1.phi()[i];
            if phi == f64::INFINITY {
                return [f64::NEG_INFINITY; 4];
            }
            let x = &xs[i];
            let base = -PI * quad(x, 0) - data.c1 * phi + g1.log_trapezoid_weight(i);
            // u = Q12^T x
            let u: Vec<f64> = (0..n).map(|b| (0..n).map(|a| x[a] * q[(a, n + b)]).sum()).collect();
            let x_edge = g1.is_boundary(i);
            let (mut inner, mut edge) = (Vec::new(), Vec::new());
            for (j, &yt) in y_terms.iter().enumerate() {
                if yt == f64::NEG_INFINITY {
                    continue;
                }
                let cross: f64 = u.iter().zip(&ys[j]).map(|(a, b)| a * b).sum();
                let v = base + yt - 2.0 * PI * cross;
                if x_edge || g2.is_boundary(j) {
                    edge.push(v);
                } else {
                    inner.push(v);
                }
            }
            let mx = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            [mx(&inner), mx(&edge), log_sum_exp(inner), log_sum_exp(edge)]
        })
        .collect();
    let total = log_sum_exp(rows.iter().flat_map(|r| [r[2], r[3]]));
    if total == f64::NEG_INFINITY {
        return Err(Error::EmptyDensity);
    }
    let max_in = rows.iter().map(|r| r[0]).fold(f64::NEG_INFINITY, f64::max);
    let max_edge = rows.iter().map(|r| r[1]).fold(f64::NEG_INFINITY, f64::max);
    let tail = if max_edge == f64::NEG_INFINITY {
        0.0
    } else if max_in == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        (max_edge - max_in).exp()
    };
    Ok(LogQuad::positive(total, tail))
}

/// Result of the centered-Gaussian search.
#[derive(Debug, Clone, PartialEq)]
pub struct BLOptimum {
    /// `log BL`; zero (flagged divergent) when the search degenerates.
    pub value: LogQuad,
    /// Smallest log-objective seen, even when degenerate.
    pub best_log: f64,
    /// Diagonal covariances at the best point.
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    /// The best point sits on the edge of the search box.
    pub degenerate: bool,
}

/// Log-covariances are searched in `[-LOG_BOX, LOG_BOX]`.
const LOG_BOX: f64 = 9.2;
const MAX_SWEEPS: usize = 400;

/// `log int exp(-pi <x,Qx>) gamma_{A1}(x1)^{c1} gamma_{A2}(x2)^{c2} dx` for
/// diagonal `A_i = diag(exp(theta))`; the Gaussians have unit mass.
pub fn bl_gaussian_objective(data: &BLData, log_a1: &[f64], log_a2: &[f64]) -> f64 {
    let n = data.dim();
    let mut m = data.qform.clone() * (2.0 * PI);
    let mut c0 = 0.0;
    for k in 0..n {
        m[(k, k)] += data.c1 * (-log_a1[k]).exp();
        m[(n + k, n + k)] += data.c2 * (-log_a2[k]).exp();
        c0 += 0.5 * data.c1 * ((2.0 * PI).ln() + log_a1[k]) + 0.5 * data.c2 * ((2.0 * PI).ln() + log_a2[k]);
    }
    match QuadraticForm::new(m, None, c0) {
        Ok(qf) => gaussian_form_integral(&qf).log_abs,
        Err(_) => f64::INFINITY,
    }
}

/// Golden-section minimum of `f` on `[lo, hi]`, assuming `f(0)` is finite
/// and `0` lies in the interval.
fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > 1e-10 {
        let go_left = if fa.is_infinite() && fb.is_infinite() {
            // both probes outside the admissible set; keep the side with 0
            b > 0.0
        } else {
            fa <= fb
        };
        if go_left {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = f(b);
        }
    }
    0.5 * (lo + hi)
}

/// Infimum of the objective over diagonal `A1, A2`, by line searches along
/// each coordinate and along the `(e_k, -e_{n+k})`, `(e_k, e_{n+k})` pairs,
/// repeated until the value changes by less than `1e-8` relative.
pub fn gaussian_bl_constant(data: &BLData) -> Result<BLOptimum> {
    let n = data.dim();
    let mut theta = vec![0.0f64; 2 * n];
    let obj = |t: &[f64]| bl_gaussian_objective(data, &t[..n], &t[n..]);
    let mut best = obj(&theta);
    if !best.is_finite() {
        return Ok(BLOptimum {
            value: LogQuad::divergent_zero(),
            best_log: best,
            a1: vec![1.0; n],
            a2: vec![1.0; n],
            degenerate: true,
        });
    }
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for k in 0..2 * n {
        let mut d = vec![0.0; 2 * n];
        d[k] = 1.0;
        dirs.push(d);
    }
    for k in 0..n {
        for sgn in [-1.0, 1.0] {
            let mut d = vec![0.0; 2 * n];
            d[k] = 1.0;
            d[n + k] = sgn;
            dirs.push(d);
        }
    }
    for _ in 0..MAX_SWEEPS {
        let start = best;
        for d in &dirs {
            // feasible step range inside the box
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            for (t, &dk) in theta.iter().zip(d) {
                if dk != 0.0 {
                    let (a, b) = ((-LOG_BOX - t) / dk, (LOG_BOX - t) / dk);
                    lo = lo.max(a.min(b));
                    hi = hi.min(a.max(b));
                }
            }
            let line = |step: f64| {
                let pt: Vec<f64> = theta.iter().zip(d).map(|(t, dk)| t + step * dk).collect();
                obj(&pt)
            };
            let step = golden(&line, lo, hi);
            let v = line(step);
            // the objective has flat directions (A1 A2 = const at the
            // endpoint), and far along them the form is ill-conditioned;
            // gains below this are rounding, not progress
            if v < best - 1e-10 * best.abs().max(1.0) {
                best = v;
                for (t, dk) in theta.iter_mut().zip(d) {
                    *t += step * dk;
                }
            }
        }
        if (start - best).abs() <= 1e-8 * best.abs().max(1.0) {
            break;
        }
    }
    let degenerate = theta.iter().any(|t| t.abs() > LOG_BOX - 0.05);
    Ok(BLOptimum {
        value: if degenerate {
            LogQuad::divergent_zero()
        } else {
            LogQuad::exact(best)
        },
        best_log: best,
        a1: theta[..n].iter().map(|t| t.exp()).collect(),
        a2: theta[n..].iter().map(|t| t.exp()).collect(),
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gaussian_to_logdensity;
    use crate::exponents::log_c_s;
    use crate::gaussian::GaussianSpec;
    use crate::grid::make_grid;

    #[test]
    fn block_structure() {
        let s = 0.3;
        let e = ExponentSchedule::endpoint(s).unwrap();
        let d = BLData::endpoint(s, 2).unwrap();
        let v = 1.0 - (-2.0 * s).exp();
        let k = 1.0 / (2.0 * PI * v);
        for i in 0..2 {
            assert!((d.qform[(i, i)] - k * (1.0 - v / e.p)).abs() < 1e-12);
            assert!((d.qform[(i, 2 + i)] + k * (-s).exp()).abs() < 1e-12);
            let want = k * (-2.0 * s).exp() * (1.0 - (1.0 - (2.0 * s).exp()) / e.q);
            assert!((d.qform[(2 + i, 2 + i)] - want).abs() < 1e-12);
        }
        assert!((&d.qform - d.qform.transpose()).amax() == 0.0);
    }

    #[test]
    fn endpoint_constant_is_dual_to_c_s() {
        let s = 0.5 * 2f64.ln();
        let d = BLData::endpoint(s, 1).unwrap();
        let opt = gaussian_bl_constant(&d).unwrap();
        assert!(!opt.degenerate);
        let e = ExponentSchedule::endpoint(s).unwrap();
        let h = log_c_s(&e, 1) + opt.value.log_abs;
        assert!(h.abs() < 1e-6, "log H = {h}");
        assert!((opt.a1[0] - 1.0).abs() < 1e-4 && (opt.a2[0] - 1.0).abs() < 1e-4);
        // the whole family A1 A2 = 1 attains the same value
        let off = bl_gaussian_objective(&d, &[0.7], &[-0.7]);
        assert!((off - opt.value.log_abs).abs() < 1e-12);
    }

    #[test]
    fn lowered_q_degenerates() {
        let s = 0.5 * 2f64.ln();
        let e = ExponentSchedule::endpoint(s).unwrap();
        let d = BLData::new(s, e.p, e.q - 0.1, 1).unwrap();
        let opt = gaussian_bl_constant(&d).unwrap();
        assert!(opt.degenerate);
        assert!(opt.value.is_zero());
    }

    #[test]
    fn grid_integral_matches_closed_form() {
        let s = 0.5 * 2f64.ln();
        let d = BLData::endpoint(s, 1).unwrap();
        let g = make_grid(1, 8.0, 257).unwrap();
        let f = gaussian_to_logdensity(&GaussianSpec::standard(1), &g).unwrap();
        let grid = bl_integral(&f, &f, &d).unwrap();
        let closed = bl_gaussian_objective(&d, &[0.0], &[0.0]);
        assert!((grid.log_abs - closed).abs() < 1e-2);
        assert!(grid.tail_ratio < 1e-6);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let d = BLData::endpoint(0.3, 2).unwrap();
        let g = make_grid(1, 4.0, 33).unwrap();
        let f = gaussian_to_logdensity(&GaussianSpec::standard(1), &g).unwrap();
        assert!(bl_integral(&f, &f, &d).is_err());
    }
}
