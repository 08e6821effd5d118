//! Whitening: an affine map sending training data to zero mean and unit
//! covariance on its top-k variance directions.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

use super::eigh::eigh_symmetric;

#[derive(Clone, Debug)]
pub struct Whitener<F> {
    /// Column means of the training data, length d.
    pub mean: Vec<F>,
    /// k×d map; `transform · (x − mean)` has identity covariance over training rows.
    pub transform: Matrix<F>,
    /// d×k right inverse of `transform`.
    pub inverse_transform: Matrix<F>,
}

/// Fits a whitener on the rows of `x`.
///
/// The k directions are the top-k right singular directions of the
/// centered data, obtained from the eigendecomposition of the centered
/// Gram matrix, and each is rescaled by its unbiased standard deviation
/// (n−1 normalization) so the whitened training covariance is the
/// identity. Directions whose variance falls below `n·ε` of the leading
/// one count as rank-deficient.
pub fn fit_whitener<F: Scalar>(x: &Matrix<F>, k: usize) -> Result<Whitener<F>> {
    let n = x.rows();
    let d = x.cols();
    if k < 1 {
        return Err(Error::InvalidArgument("whitener needs k >= 1".into()));
    }
    if n < 2 || n < k {
        return Err(Error::InvalidArgument(format!(
            "whitener needs at least max(2, k) = {} rows, got {n}",
            k.max(2)
        )));
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("whitener input".into()));
    }

    let mean = x.col_means();
    let centered = x.center_rows(&mean);
    let gram = centered.gram();
    let (mut lambda, v) = eigh_symmetric(&gram)?;
    for l in &mut lambda {
        *l = l.max(F::zero());
    }

    let rank_tol = lambda.first().copied().unwrap_or_else(F::zero) * F::of(n.max(d) as f64) * F::epsilon();
    let effective = lambda.iter().take_while(|&&l| l > rank_tol).count();
    if effective < k {
        return Err(Error::RankDeficient { requested: k, effective });
    }

    let n1 = F::of((n - 1) as f64);
    let mut transform = Matrix::zeros(k, d);
    let mut inverse_transform = Matrix::zeros(d, k);
    for t in 0..k {
        let sd = (lambda[t] / n1).sqrt();
        for j in 0..d {
            transform[(t, j)] = v[(j, t)] / sd;
            inverse_transform[(j, t)] = v[(j, t)] * sd;
        }
    }
    Ok(Whitener { mean, transform, inverse_transform })
}

impl<F: Scalar> Whitener<F> {
    pub fn k(&self) -> usize {
        self.transform.rows()
    }

    pub fn input_dims(&self) -> usize {
        self.transform.cols()
    }

    /// Applies the whitening map to every row of `x`.
    pub fn whiten_rows(&self, x: &Matrix<F>) -> Matrix<F> {
        assert_eq!(x.cols(), self.input_dims(), "whitener dimension mismatch");
        x.center_rows(&self.mean).mul_transpose(&self.transform)
    }
}
