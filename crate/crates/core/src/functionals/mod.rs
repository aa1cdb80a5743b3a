//! Scalar functionals built from the transforms and kernels.

mod brascamp;
mod laplace;
mod lr;
mod revhc;
mod tropical;
mod volume;

pub use crate::exponents::nelson_q;
pub use brascamp::{bl_gaussian_objective, bl_integral, gaussian_bl_constant, BLData, BLOptimum};
pub use laplace::{
    equiv_form_check, laplace_f_t, laplace_grid, laplace_norm_ratio, laplace_transform,
    q_functional, q_value, LaplaceField,
};
pub use lr::{lr_volume_product, lr_volume_product_with};
pub use revhc::{gaussian_rev_hc, ou_power_integral, rev_hc_value, RevHCReport};
pub use tropical::{tropical_limit_curve, TropicalCurve};
pub use volume::{volume_product, volume_product_auto};
