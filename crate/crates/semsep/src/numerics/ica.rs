//! FastICA with parallel (symmetric) fixed-point updates.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;

use super::eigh::eigh_symmetric;
use super::svd::pseudo_inverse;
use super::whiten::{fit_whitener, Whitener};

/// Seed for the deterministic generator (ChaCha8) that draws the initial
/// unmixing matrix. Identical seeds give bit-identical fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed(pub u64);

/// Contrast function driving the fixed-point iteration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nonlinearity {
    /// g(u) = tanh(u), g'(u) = 1 − tanh²(u).
    #[default]
    Logcosh,
    /// g(u) = u·exp(−u²/2).
    Exp,
    /// g(u) = u³.
    Cube,
}

#[derive(Clone, Copy, Debug)]
pub struct IcaOptions {
    pub nonlinearity: Nonlinearity,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for IcaOptions {
    fn default() -> Self {
        IcaOptions { nonlinearity: Nonlinearity::Logcosh, max_iter: 200, tol: 1e-4 }
    }
}

#[derive(Clone, Debug)]
pub struct IcaResult<F> {
    /// d×k mixing matrix A: centered data ≈ sources · Aᵀ.
    pub mixing: Matrix<F>,
    /// k×d unmixing matrix C: sources == (x − mean) · Cᵀ.
    pub unmixing: Matrix<F>,
    /// n×k source matrix, one row per sample, unit variance per column.
    pub sources: Matrix<F>,
    pub n_iter: usize,
    /// False when the iteration hit `max_iter` before the update stalled;
    /// the decomposition is still returned.
    pub converged: bool,
    /// The whitener fitted on the input; its mean centers new data.
    pub whitener: Whitener<F>,
}

impl Nonlinearity {
    /// Applies g elementwise to `u` in place — one sample per row, one
    /// component per column — and returns the per-component mean of g'. The
    /// variant dispatch sits outside the sweep so each arm is a tight
    /// elementwise loop over contiguous rows.
    fn apply<F: Scalar>(self, u: &mut Matrix<F>) -> Vec<F> {
        let (n, k) = (u.rows(), u.cols());
        let mut gprime = vec![F::zero(); k];
        match self {
            Nonlinearity::Logcosh => {
                for i in 0..n {
                    for (val, gp) in u.row_mut(i).iter_mut().zip(&mut gprime) {
                        let t = F::of(super::fasttanh::tanh_approx(val.widen()));
                        *val = t;
                        *gp += F::one() - t * t;
                    }
                }
            }
            Nonlinearity::Exp => {
                let half = F::of(0.5);
                for i in 0..n {
                    for (val, gp) in u.row_mut(i).iter_mut().zip(&mut gprime) {
                        let x = *val;
                        let e = (-x * x * half).exp();
                        *val = x * e;
                        *gp += (F::one() - x * x) * e;
                    }
                }
            }
            Nonlinearity::Cube => {
                let three = F::of(3.0);
                for i in 0..n {
                    for (val, gp) in u.row_mut(i).iter_mut().zip(&mut gprime) {
                        let x = *val;
                        *val = x * x * x;
                        *gp += three * x * x;
                    }
                }
            }
        }
        let nf = F::of(n as f64);
        for g in &mut gprime {
            *g = *g / nf;
        }
        gprime
    }
}

/// W ← (W·Wᵀ)^(−1/2) · W, making the rows of W orthonormal while moving
/// all of them as little as possible.
fn symmetric_decorrelation<F: Scalar>(w: &Matrix<F>) -> Result<Matrix<F>> {
    let (lambda, e) = eigh_symmetric(&w.mul_transpose(w))?;
    let k = w.rows();
    let floor = F::of(1e-12);
    let mut factor = Matrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let mut acc = F::zero();
            for t in 0..k {
                acc += e[(a, t)] * e[(b, t)] / lambda[t].max(floor).sqrt();
            }
            factor[(a, b)] = acc;
        }
    }
    Ok(factor.matmul(w))
}

/// Runs FastICA on the rows of `x`, estimating `k` independent components.
///
/// The data is centered and whitened first (which reduces to k
/// dimensions), then a random orthogonal unmixing matrix is refined by
/// parallel fixed-point updates with symmetric decorrelation after each
/// step. Convergence is declared when
/// `max_j |1 − |⟨w_new_j, w_old_j⟩|| < tol`. The returned mixing and
/// unmixing matrices are composed back through the whitener, so they
/// apply to centered raw-space vectors, and `unmixing · mixing == I_k`.
pub fn fastica<F: Scalar>(x: &Matrix<F>, k: usize, seed: RngSeed, opts: &IcaOptions) -> Result<IcaResult<F>> {
    let whitener = fit_whitener(x, k)?;
    let z = whitener.whiten_rows(x);
    let n = F::of(z.rows() as f64);

    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let mut w: Matrix<F> = Matrix::from_fn(k, k, |_, _| {
        F::of(rand::Rng::sample(&mut rng, rand_distr::StandardNormal))
    });
    w = symmetric_decorrelation(&w)?;

    let mut converged = false;
    let mut n_iter = opts.max_iter;
    for it in 1..=opts.max_iter {
        let mut u = z.mul_transpose(&w);
        let gprime_mean = opts.nonlinearity.apply(&mut u);
        // w1 = E[g(u)·zᵀ] − diag(E[g'(u)])·w
        let mut w1 = u.transpose_mul(&z).scaled(F::one() / n);
        for j in 0..k {
            let gm = gprime_mean[j];
            for (v, &o) in w1.row_mut(j).iter_mut().zip(w.row(j)) {
                *v -= gm * o;
            }
        }
        let w1 = symmetric_decorrelation(&w1)?;
        if !w1.is_finite() {
            return Err(Error::Numeric(format!("fastica produced non-finite values at iteration {it}")));
        }
        let mut lim = F::zero();
        for j in 0..k {
            let c = dot(w1.row(j), w.row(j)).abs();
            lim = lim.max((F::one() - c).abs());
        }
        w = w1;
        if lim.widen() < opts.tol {
            converged = true;
            n_iter = it;
            break;
        }
    }

    let unmixing = w.matmul(&whitener.transform);
    let mixing = pseudo_inverse(&unmixing)?;
    let sources = z.mul_transpose(&w);
    Ok(IcaResult { mixing, unmixing, sources, n_iter, converged, whitener })
}
