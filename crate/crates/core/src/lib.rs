//! Numerical toolkit for even log-concave-type densities on tensor grids:
//! Legendre/polar transforms, Ornstein-Uhlenbeck and Fokker-Planck kernels,
//! volume products and reverse hypercontractivity functionals.

pub mod body;
pub mod contract;
pub mod density;
pub mod error;
pub mod exponents;
pub mod families;
pub mod functionals;
pub mod gaussian;
pub mod grid;
pub mod heatflow;
pub mod legendre;
pub mod logquad;
pub mod oracles;
pub mod quadrature;

pub use body::{BodyKind, BodySpec};
pub use density::{body_to_logdensity, check_even, gaussian_to_logdensity, LogDensity};
pub use error::{Error, Result};
pub use exponents::{conjugate, nelson_q, ExponentSchedule};
pub use families::Family;
pub use functionals::{
    equiv_form_check, gaussian_bl_constant, gaussian_rev_hc, laplace_f_t, laplace_norm_ratio,
    lr_volume_product, q_functional, rev_hc_value, tropical_limit_curve, volume_product, BLData,
    RevHCReport,
};
pub use gaussian::GaussianSpec;
pub use grid::{make_grid, GridSpec};
pub use heatflow::{flow_trajectory, fp_evolve, ou_apply, ou_apply_flagged, FlowKernel};
pub use legendre::{convex_envelope, legendre_1d, legendre_transform, polar_density, DualGrid};
pub use logquad::LogQuad;
pub use quadrature::{log_integral, log_lq_norm, Measure};
