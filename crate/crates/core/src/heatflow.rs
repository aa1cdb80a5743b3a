//! Ornstein-Uhlenbeck semigroup and Fokker-Planck flow through their exact
//! Gaussian kernels.
//!
//! Both kernels factor over coordinates, so each is applied as one 1D log
//! contraction per axis. Output grids equal input grids.

use std::f64::consts::PI;

use crate::contract::{contract_all_with_edges, contract_axis, LogKernel};
use crate::density::LogDensity;
use crate::error::{Error, Result};
use crate::grid::{axis_log_trapezoid_weights, GridSpec};

/// Per-axis log-kernels of the Fokker-Planck flow at time `t`.
///
/// Entry `(o, i)` on axis `k` is
/// `-(x_o - e^{-t} y_i)^2 / (2v) - log sqrt(2 pi v) + log w_i`
/// with `v = 1 - e^{-2t}` and `w_i` the trapezoid weight of node `i`.
#[derive(Debug, Clone)]
pub struct FlowKernel {
    t: f64,
    axes: Vec<LogKernel>,
}

/// Which variable carries the `e^{-t}` contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scaled {
    Input,
    Output,
}

fn kernel_variance(t: f64) -> f64 {
    -(-2.0 * t).exp_m1()
}

fn check_time(t: f64, what: &str) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {t}")));
    }
    Ok(())
}

fn build_axes(grid: &GridSpec, t: f64, scaled: Scaled) -> Result<Vec<LogKernel>> {
    let v = kernel_variance(t);
    let std = v.sqrt();
    let shrink = (-t).exp();
    let norm = 0.5 * (2.0 * PI * v).ln();
    (0..grid.dim())
        .map(|k| {
            let h = grid.spacing(k);
            if std < h {
                return Err(Error::KernelUnderResolved { std, spacing: h });
            }
            let x = grid.axis_coords(k);
            let w = axis_log_trapezoid_weights(x.len(), h);
            Ok(LogKernel::from_fn(x.len(), x.len(), |o, i| {
                let d = match scaled {
                    Scaled::Input => x[o] - shrink * x[i],
                    Scaled::Output => shrink * x[o] - x[i],
                };
                -d * d / (2.0 * v) - norm + w[i]
            }))
        })
        .collect()
}

impl FlowKernel {
    pub fn new(grid: &GridSpec, t: f64) -> Result<Self> {
        check_time(t, "flow time")?;
        Ok(Self {
            t,
            axes: build_axes(grid, t, Scaled::Input)?,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn axis(&self, k: usize) -> &LogKernel {
        &self.axes[k]
    }

    /// Largest `|log(sum_o w_o K(x_o, y_i))|` over input nodes `y_i` with
    /// `|y_i| <= interior` on every axis: the mass defect of one column.
    pub fn column_mass_defect(&self, grid: &GridSpec, interior: f64) -> f64 {
        let mut worst = 0.0f64;
        for (k, kern) in self.axes.iter().enumerate() {
            let w = axis_log_trapezoid_weights(grid.points(k), grid.spacing(k));
            for i in 0..kern.n_in {
                if grid.coord(k, i).abs() > interior {
                    continue;
                }
                let s = crate::logquad::log_sum_exp((0..kern.n_out).map(|o| kern.data[o * kern.n_in + i] + w[o] - w[i]));
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    fn apply(&self, log_f: &[f64], grid: &GridSpec) -> Vec<f64> {
        apply_axes(&self.axes, log_f, grid)
    }
}

fn apply_axes(axes: &[LogKernel], log_f: &[f64], grid: &GridSpec) -> Vec<f64> {
    let mut field = log_f.to_vec();
    let mut shape = grid.shape().to_vec();
    for (k, kern) in axes.iter().enumerate() {
        let (next, s) = contract_axis(&field, &shape, k, kern);
        field = next;
        shape = s;
    }
    field
}

fn from_log_values(grid: &GridSpec, log_f: Vec<f64>) -> Result<LogDensity> {
    LogDensity::new(grid.clone(), log_f.into_iter().map(|v| -v).collect())
}

/// `f_t = P_t^* f_0`. `t = 0` returns `f_0` unchanged.
pub fn fp_evolve(f0: &LogDensity, t: f64) -> Result<LogDensity> {
    if t == 0.0 {
        return Ok(f0.clone());
    }
    let kernel = FlowKernel::new(f0.grid(), t)?;
    fp_evolve_with(f0, &kernel)
}

/// [`fp_evolve`] with a prebuilt kernel for the same grid.
pub fn fp_evolve_with(f0: &LogDensity, kernel: &FlowKernel) -> Result<LogDensity> {
    from_log_values(f0.grid(), kernel.apply(&f0.log_values(), f0.grid()))
}

/// `P_s g(x) = E[g(e^{-s} x + sqrt(1 - e^{-2s}) Z)]` for `g = exp(-phi)`.
///
/// Output nodes whose kernel mass reaches past the box see a truncated
/// average; callers restrict attention to the interior where that matters.
pub fn ou_apply(g: &LogDensity, s: f64) -> Result<LogDensity> {
    check_time(s, "semigroup time")?;
    let axes = build_axes(g.grid(), s, Scaled::Output)?;
    from_log_values(g.grid(), apply_axes(&axes, &g.log_values(), g.grid()))
}

/// [`ou_apply`] together with a mask of outputs whose dominant input is an
/// edge node (there the truncated average can be far off, or the exact one
/// infinite).
pub fn ou_apply_flagged(g: &LogDensity, s: f64) -> Result<(LogDensity, Vec<bool>)> {
    check_time(s, "semigroup time")?;
    let axes = build_axes(g.grid(), s, Scaled::Output)?;
    let (field, flagged) = contract_all_with_edges(&g.log_values(), g.grid().shape(), &axes);
    Ok((from_log_values(g.grid(), field)?, flagged))
}

/// Independent exact evaluations `f_{t_k}` for strictly increasing `t_k > 0`.
pub fn flow_trajectory(f0: &LogDensity, times: &[f64]) -> Result<Vec<LogDensity>> {
    if times.is_empty() {
        return Err(Error::InvalidParameter("empty time list".into()));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidParameter("times must be strictly increasing".into()));
    }
    times
        .iter()
        .map(|&t| {
            check_time(t, "flow time")?;
            fp_evolve(f0, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::gaussian_to_logdensity;
    use crate::gaussian::GaussianSpec;
    use crate::grid::make_grid;
    use crate::quadrature::{log_integral, Measure};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gauss(beta: f64, grid: &GridSpec) -> LogDensity {
        gaussian_to_logdensity(&GaussianSpec::isotropic(1.0, beta, grid.dim()).unwrap(), grid)
            .unwrap()
    }

    fn boxed(grid: &GridSpec) -> LogDensity {
        LogDensity::from_fn(grid.clone(), |x| {
            if x.iter().all(|v| v.abs() <= 1.0) {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .unwrap()
    }

    #[test]
    fn gaussian_is_stationary() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let g = gauss(1.0, &grid);
        for t in [0.1, 1.0, 3.0] {
            let ft = fp_evolve(&g, t).unwrap();
            for (a, b) in ft.values().iter().zip(g.values()) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn gaussian_variance_law() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        for (beta, t) in [(0.25, 0.3), (2.0, 0.5), (3.0, 1.0)] {
            let bt = 1.0 - (-2.0 * t as f64).exp() + (-2.0 * t as f64).exp() * beta;
            let ft = fp_evolve(&gauss(beta, &grid), t).unwrap();
            let exact = gauss(bt, &grid);
            for (a, b) in ft.values().iter().zip(exact.values()) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn box_relaxes_to_scaled_gaussian() {
        // The limit is (grid mass of f0) * gamma; at N = 1025 the sampled box
        // carries mass 2 + h, within 1% of 2.
        for n in [513, 1025] {
            let grid = make_grid(1, 8.0, n).unwrap();
            let f0 = boxed(&grid);
            let mass = log_integral(&f0, Measure::Lebesgue).value();
            let ft = fp_evolve(&f0, 5.0).unwrap();
            let g = gauss(1.0, &grid);
            for (i, (a, b)) in ft.values().iter().zip(g.values()).enumerate() {
                if grid.coord(0, i).abs() <= 4.0 {
                    assert!((a / (mass * b) - 1.0).abs() < 1e-3);
                    if n == 1025 {
                        assert!((a / (2.0 * b) - 1.0).abs() < 0.01);
                    }
                }
            }
        }
    }

    #[test]
    fn mass_and_evenness_are_preserved() {
        let grid = make_grid(2, 6.0, 65).unwrap();
        let f0 = boxed(&grid);
        let m0 = log_integral(&f0, Measure::Lebesgue).log_abs;
        let ft = fp_evolve(&f0, 0.4).unwrap();
        assert!(ft.is_even());
        assert!((log_integral(&ft, Measure::Lebesgue).log_abs - m0).abs() < 1e-8);
        assert!(ft.phi().iter().all(|v| v.is_finite()));
    }

    #[test]
    fn semigroup_composition() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let f0 = LogDensity::from_fn(grid.clone(), |x| x[0].powi(4)).unwrap();
        let two_step = fp_evolve(&fp_evolve(&f0, 0.3).unwrap(), 0.5).unwrap();
        let direct = fp_evolve(&f0, 0.8).unwrap();
        for (i, (a, b)) in two_step.phi().iter().zip(direct.phi()).enumerate() {
            if grid.coord(0, i).abs() <= 4.0 {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn under_resolved_kernel_is_refused() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let err = fp_evolve(&gauss(1.0, &grid), 1e-4).unwrap_err();
        assert!(matches!(err, Error::KernelUnderResolved { .. }));
        assert!(fp_evolve(&gauss(1.0, &grid), -1.0).is_err());
    }

    #[test]
    fn kernel_columns_carry_unit_mass() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let k = FlowKernel::new(&grid, 0.5).unwrap();
        let d = k.column_mass_defect(&grid, 4.0);
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn trajectory_rejects_unsorted_times() {
        let grid = make_grid(1, 8.0, 129).unwrap();
        assert!(flow_trajectory(&gauss(1.0, &grid), &[1.0, 0.5]).is_err());
        let traj = flow_trajectory(&gauss(1.0, &grid), &[0.1, 1.0, 3.0]).unwrap();
        assert_eq!(traj.len(), 3);
    }

    #[test]
    fn ou_fixes_constants() {
        let grid = make_grid(1, 8.0, 513).unwrap();
        let one = LogDensity::new(grid.clone(), vec![0.0; grid.len()]).unwrap();
        let out = ou_apply(&one, 0.5).unwrap();
        for (i, v) in out.phi().iter().enumerate() {
            if grid.coord(0, i).abs() <= 4.0 {
                assert!(v.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn ou_on_exponentials() {
        // P_s e^{a y}(x) = exp(e^{-s} a x + (1 - e^{-2s}) a^2 / 2)
        let grid = make_grid(1, 8.0, 513).unwrap();
        let (a, s) = (1.0, 0.7f64);
        let g = LogDensity::from_fn(grid.clone(), |y| -a * y[0]).unwrap();
        let out = ou_apply(&g, s).unwrap();
        for (i, v) in out.phi().iter().enumerate() {
            let x = grid.coord(0, i);
            if x.abs() <= 4.0 {
                let exact = (-s).exp() * a * x + 0.5 * (1.0 - (-2.0 * s).exp()) * a * a;
                assert!((-v - exact).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ou_is_self_adjoint_in_gaussian_space() {
        let grid = make_grid(1, 8.0, 257).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // smooth bounded random functions so truncation stays negligible
        let mut random_fn = || {
            let c: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
            LogDensity::from_fn(grid.clone(), move |y| {
                c.iter().enumerate().map(|(k, ck)| ck * ((k + 1) as f64 * y[0]).sin()).sum()
            })
            .unwrap()
        };
        let (g, u) = (random_fn(), random_fn());
        let s = 0.6;
        let (pg, pu) = (ou_apply(&g, s).unwrap(), ou_apply(&u, s).unwrap());
        let pair = |a: &LogDensity, b: &LogDensity| {
            let phi: Vec<f64> = a.phi().iter().zip(b.phi()).map(|(x, y)| x + y).collect();
            log_integral(&a.with_phi(phi).unwrap(), Measure::StandardGaussian).value()
        };
        assert!((pair(&pg, &u) - pair(&g, &pu)).abs() < 1e-8);
    }
}
