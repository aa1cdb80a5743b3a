//! Symmetric tensor grids on boxes `[-R_1, R_1] x ... x [-R_n, R_n]`.

use crate::error::{Error, Result};

/// Largest supported dimension. All quadrature is tensor-product.
pub const MAX_DIM: usize = 3;

/// A uniform tensor grid, symmetric about the origin, with an odd number of
/// nodes on every axis so the origin is itself a node.
///
/// Nodes are laid out row-major: axis 0 varies slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    half_width: Vec<f64>,
    points: Vec<usize>,
    spacing: Vec<f64>,
}

impl GridSpec {
    /// Same half-width and point count on every axis.
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        Self::from_axes(&vec![half_width; dim], &vec![points; dim])
    }

    pub fn from_axes(half_width: &[f64], points: &[usize]) -> Result<Self> {
        let dim = half_width.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if points.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "{} half-widths but {} point counts",
                dim,
                points.len()
            )));
        }
        for (k, (&r, &n)) in half_width.iter().zip(points).enumerate() {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: half-width must be positive and finite, got {r}"
                )));
            }
            if n < 3 || n % 2 == 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: point count must be odd and >= 3, got {n}"
                )));
            }
        }
        let spacing = half_width
            .iter()
            .zip(points)
            .map(|(&r, &n)| 2.0 * r / (n - 1) as f64)
            .collect();
        Ok(Self {
            half_width: half_width.to_vec(),
            points: points.to_vec(),
            spacing,
        })
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn half_width(&self, axis: usize) -> f64 {
        self.half_width[axis]
    }

    pub fn points(&self, axis: usize) -> usize {
        self.points[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.spacing[axis]
    }

    pub fn shape(&self) -> &[usize] {
        &self.points
    }

    /// Index of the origin along an axis.
    pub fn center(&self, axis: usize) -> usize {
        (self.points[axis] - 1) / 2
    }

    /// Coordinate of node `i` on `axis`.
    ///
    /// Computed as `(i - c) * h` with `c` the center index, so `coord(c + m)`
    /// and `coord(c - m)` are exact negatives of each other.
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        (i as f64 - self.center(axis) as f64) * self.spacing[axis]
    }

    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.points[axis]).map(|i| self.coord(axis, i)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Product of spacings: the volume of one grid cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Row-major stride of `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.points[axis + 1..].iter().product()
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            idx[k] = flat % self.points[k];
            flat /= self.points[k];
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.points)
            .fold(0, |acc, (&i, &n)| acc * n + i)
    }

    /// Coordinates of the node at `flat`.
    pub fn node(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(k, &i)| self.coord(k, i))
            .collect()
    }

    /// Flat index of the node at `-x` when `flat` sits at `x`.
    pub fn mirror(&self, flat: usize) -> usize {
        let idx: Vec<usize> = self
            .multi_index(flat)
            .iter()
            .zip(&self.points)
            .map(|(&i, &n)| n - 1 - i)
            .collect();
        self.flat_index(&idx)
    }

    /// True when the node touches the outer face of the box on any axis.
    pub fn is_boundary(&self, flat: usize) -> bool {
        self.multi_index(flat)
            .iter()
            .zip(&self.points)
            .any(|(&i, &n)| i == 0 || i == n - 1)
    }

    /// Natural log of the tensor trapezoid coefficient at `flat`.
    pub fn log_trapezoid_weight(&self, flat: usize) -> f64 {
        self.multi_index(flat)
            .iter()
            .enumerate()
            .map(|(k, &i)| axis_log_trapezoid(self.points[k], self.spacing[k], i))
            .sum()
    }

    /// Trapezoid log-coefficients for every node, row-major.
    pub fn log_trapezoid_weights(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = (0..self.dim())
            .map(|k| {
                (0..self.points[k])
                    .map(|i| axis_log_trapezoid(self.points[k], self.spacing[k], i))
                    .collect()
            })
            .collect();
        let mut out = vec![0.0; self.len()];
        for (flat, w) in out.iter_mut().enumerate() {
            let idx = self.multi_index(flat);
            *w = idx.iter().enumerate().map(|(k, &i)| per_axis[k][i]).sum();
        }
        out
    }

    /// Squared Euclidean norm of every node, row-major.
    pub fn squared_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|flat| self.node(flat).iter().map(|x| x * x).sum())
            .collect()
    }

    /// Checks that `other` has the same dimension.
    pub fn ensure_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: dim,
            });
        }
        Ok(())
    }
}

/// Log of the 1D trapezoid coefficient: `h` inside, `h/2` at both ends.
pub(crate) fn axis_log_trapezoid(n: usize, h: f64, i: usize) -> f64 {
    if i == 0 || i == n - 1 {
        (0.5 * h).ln()
    } else {
        h.ln()
    }
}

pub(crate) fn axis_log_trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    (0..n).map(|i| axis_log_trapezoid(n, h, i)).collect()
}

/// `make_grid`: validated symmetric grid with the same extent on every axis.
pub fn make_grid(dim: usize, half_width: f64, points: usize) -> Result<GridSpec> {
    GridSpec::new(dim, half_width, points)
}
