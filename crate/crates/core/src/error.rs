use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("density is identically zero (every node is +inf)")]
    EmptyDensity,
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("matrix is not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("kernel under-resolved: std {std:.3e} below grid spacing {spacing:.3e}")]
    KernelUnderResolved { std: f64, spacing: f64 },
    #[error("Hessian of -log h is not positive definite at node {node:?} (x = {coords:?})")]
    HessianNotPositive { node: Vec<usize>, coords: Vec<f64> },
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("samples must be equally spaced and bracket the evaluation point: {0}")]
    BadSamples(String),
    #[error("unknown closed form `{0}`")]
    UnknownClosedForm(String),
    #[error("missing parameter `{0}`")]
    MissingParameter(String),
}
