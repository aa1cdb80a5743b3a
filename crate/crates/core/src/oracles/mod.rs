//! Reference computations that share no integration code with the main path.

mod brute;
mod closed;
mod fd;
mod poincare;
mod quadform;

pub use brute::{brute_legendre, BRUTE_MAX_NODES};
pub use closed::{gaussian_closed_forms, CLOSED_FORM_NAMES};
pub use fd::fd_derivative;
pub use poincare::{cramer_rao_check, pbl_check, tilt};
pub use quadform::{gaussian_form_integral, QuadraticForm};
