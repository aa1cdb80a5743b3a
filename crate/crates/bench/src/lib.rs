//! Inputs shared by the benchmarks in `benches/`.

use vpflow_core::{make_grid, Family, LogDensity};

/// A battery member on the default grid of its dimension
/// (`[-8, 8]` with 513 nodes in 1D, `[-6, 6]^2` with 129 per axis in 2D).
pub fn input(family: Family, dim: usize) -> LogDensity {
    let grid = if dim == 1 {
        make_grid(1, 8.0, 513)
    } else {
        make_grid(dim, 6.0, 129)
    }
    .expect("fixed grid parameters are valid");
    family.build(&grid).expect("battery families build on the default grids")
}
