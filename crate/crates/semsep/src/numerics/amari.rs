//! Amari index: a permutation- and scale-invariant score of how close a
//! matrix product is to a signed permutation.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Amari index of `P = W·A`, normalized to [0, 1].
///
/// For each row the off-maximum absolute mass is summed relative to the
/// row maximum, likewise for columns, and the total is divided by
/// 2·k·(k−1). The result is 0 exactly when P is a scaled signed
/// permutation and grows toward 1 as the product mixes components
/// uniformly. Rows or columns that are entirely zero contribute the
/// worst-case value, so singular products stay finite.
pub fn amari_index<F: Scalar>(w: &Matrix<F>, a: &Matrix<F>) -> Result<f64> {
    if w.cols() != a.rows() || w.rows() != a.cols() {
        return Err(Error::InvalidArgument("amari_index needs a square product W·A".into()));
    }
    let k = w.rows();
    if k == 0 {
        return Err(Error::InvalidArgument("amari_index needs k >= 1".into()));
    }
    if k == 1 {
        return Ok(0.0);
    }
    let p = w.matmul(a);
    let mut total = 0.0f64;
    for i in 0..k {
        total += off_max_ratio((0..k).map(|j| p[(i, j)].widen().abs()), k);
    }
    for j in 0..k {
        total += off_max_ratio((0..k).map(|i| p[(i, j)].widen().abs()), k);
    }
    Ok(total / (2.0 * k as f64 * (k as f64 - 1.0)))
}

fn off_max_ratio(values: impl Iterator<Item = f64>, k: usize) -> f64 {
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for v in values {
        sum += v;
        max = max.max(v);
    }
    if max == 0.0 {
        return (k - 1) as f64;
    }
    sum / max - 1.0
}
