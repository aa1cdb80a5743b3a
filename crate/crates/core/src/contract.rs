//! Log-domain kernel contraction along one axis of a tensor field.

use rayon::prelude::*;

/// Dense log-kernel `K[o][i]` mapping `n_in` nodes to `n_out` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct LogKernel {
    pub n_out: usize,
    pub n_in: usize,
    pub data: Vec<f64>,
}

impl LogKernel {
    pub fn from_fn(n_out: usize, n_in: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        let data = (0..n_out * n_in)
            .into_par_iter()
            .map(|k| f(k / n_in, k % n_in))
            .collect();
        Self { n_out, n_in, data }
    }

    pub fn row(&self, o: usize) -> &[f64] {
        &self.data[o * self.n_in..(o + 1) * self.n_in]
    }

    /// `log sum_o exp K[o][i]` for each input column.
    pub fn column_log_sums(&self) -> Vec<f64> {
        (0..self.n_in)
            .map(|i| crate::logquad::log_sum_exp((0..self.n_out).map(|o| self.data[o * self.n_in + i])))
            .collect()
    }

    /// `log sum_i exp K[o][i]` for each output row.
    pub fn row_log_sums(&self) -> Vec<f64> {
        (0..self.n_out)
            .map(|o| crate::logquad::log_sum_exp_slice(self.row(o)))
            .collect()
    }
}

/// Replaces axis `axis` of the row-major `field` (shape `shape`) by
/// `out[.., o, ..] = log sum_i exp(K[o][i] + field[.., i, ..])`.
///
/// Returns the new field and its shape. Lines are independent, so the result
/// does not depend on the thread schedule.
pub fn contract_axis(
    field: &[f64],
    shape: &[usize],
    axis: usize,
    kernel: &LogKernel,
) -> (Vec<f64>, Vec<usize>) {
    assert_eq!(shape[axis], kernel.n_in, "kernel/axis size mismatch");
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let (n_in, n_out) = (kernel.n_in, kernel.n_out);

    let lines: Vec<Vec<f64>> = (0..outer * inner)
        .into_par_iter()
        .map(|line| {
            let (a, b) = (line / inner, line % inner);
            let input: Vec<f64> = (0..n_in).map(|i| field[(a * n_in + i) * inner + b]).collect();
            (0..n_out)
                .map(|o| mirrored_log_sum(kernel.row(o), &input))
                .collect()
        })
        .collect();

    let mut out_shape = shape.to_vec();
    out_shape[axis] = n_out;
    let mut out = vec![f64::NEG_INFINITY; outer * n_out * inner];
    for (line, vals) in lines.into_iter().enumerate() {
        let (a, b) = (line / inner, line % inner);
        for (o, v) in vals.into_iter().enumerate() {
            out[(a * n_out + o) * inner + b] = v;
        }
    }
    (out, out_shape)
}

/// `log sum_i exp(row[i] + input[i])`, accumulated in pairs `(i, n - 1 - i)`
/// from the middle outwards so that mirrored data give bitwise mirrored sums.
fn mirrored_log_sum(row: &[f64], input: &[f64]) -> f64 {
    let n = row.len();
    let term = |i: usize| {
        if input[i] == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            row[i] + input[i]
        }
    };
    let m = (0..n).map(term).fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY || m == f64::INFINITY {
        return m;
    }
    let mut s = if n % 2 == 1 { (term(n / 2) - m).exp() } else { 0.0 };
    for i in (0..n / 2).rev() {
        s += (term(i) - m).exp() + (term(n - 1 - i) - m).exp();
    }
    m + s.ln()
}

/// Index of the maximizing input for every output of [`contract_axis`];
/// used to detect outputs dominated by the edge of the input box.
pub fn argmax_axis(field: &[f64], shape: &[usize], axis: usize, kernel: &LogKernel) -> Vec<usize> {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let (n_in, n_out) = (kernel.n_in, kernel.n_out);
    let lines: Vec<Vec<usize>> = (0..outer * inner)
        .into_par_iter()
        .map(|line| {
            let (a, b) = (line / inner, line % inner);
            (0..n_out)
                .map(|o| {
                    let row = kernel.row(o);
                    let mut best = (f64::NEG_INFINITY, 0);
                    for i in 0..n_in {
                        let v = row[i] + field[(a * n_in + i) * inner + b];
                        if v > best.0 {
                            best = (v, i);
                        }
                    }
                    best.1
                })
                .collect()
        })
        .collect();
    let mut out = vec![0; outer * n_out * inner];
    for (line, vals) in lines.into_iter().enumerate() {
        let (a, b) = (line / inner, line % inner);
        for (o, v) in vals.into_iter().enumerate() {
            out[(a * n_out + o) * inner + b] = v;
        }
    }
    out
}

/// Contracts every axis in turn and marks outputs whose dominant input path
/// comes within one node of either end of some axis. (With trapezoid weights
/// baked into the kernel, the halved end weight can move the maximizer of an
/// edge-dominated sum one node inward.)
pub fn contract_all_with_edges(field: &[f64], shape: &[usize], kernels: &[LogKernel]) -> (Vec<f64>, Vec<bool>) {
    let mut field = field.to_vec();
    let mut shape = shape.to_vec();
    let mut flagged = vec![false; field.len()];
    for (k, kernel) in kernels.iter().enumerate() {
        let arg = argmax_axis(&field, &shape, k, kernel);
        let inner: usize = shape[k + 1..].iter().product();
        let n_in = shape[k];
        let n_out = kernel.n_out;
        flagged = arg
            .iter()
            .enumerate()
            .map(|(j, &i)| {
                let (a, b) = (j / (n_out * inner), j % inner);
                i <= 1 || i + 2 >= n_in || flagged[(a * n_in + i) * inner + b]
            })
            .collect();
        let (out, out_shape) = contract_axis(&field, &shape, k, kernel);
        field = out;
        shape = out_shape;
    }
    (field, flagged)
}
