//! Classical decomposition baselines over bag-of-words matrices:
//! nonnegative matrix factorization (multiplicative updates) and latent
//! semantic analysis (truncated SVD).

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::corpus::{BowMatrix, Vocabulary};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::numerics::{eigh_symmetric, svd, RngSeed};
use crate::s3::{rank_pole, TopicDescription};

const MU_EPS: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct NmfModel {
    /// n×k nonnegative document loadings.
    pub doc_topic: Matrix<f64>,
    /// k×m nonnegative topic-term weights.
    pub topic_term: Matrix<f64>,
    pub n_iter: usize,
    /// Frobenius reconstruction error after the last update.
    pub final_loss: f64,
    /// Reconstruction error at init and after every iteration.
    pub loss_trace: Vec<f64>,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct LsaModel {
    /// n×k document scores (left singular vectors scaled by the values).
    pub doc_scores: Matrix<f64>,
    /// m×k term scores (right singular vectors).
    pub term_scores: Matrix<f64>,
    /// Nonincreasing; zero beyond the effective rank.
    pub singular_values: Vec<f64>,
    /// Number of components actually supported by the matrix (≤ k).
    pub effective_rank: usize,
}

impl LsaModel {
    pub fn is_rank_deficient(&self) -> bool {
        self.effective_rank < self.singular_values.len()
    }
}

/// Multiplicative-update NMF minimizing Frobenius loss, started from a
/// nonnegative-SVD decomposition with zeros filled by the matrix mean so
/// the updates can reach every entry. Stops when the relative loss change
/// drops below `tol` or after `max_iter` sweeps.
pub fn fit_nmf(b: &BowMatrix, k: usize, seed: RngSeed, max_iter: usize, tol: f64) -> Result<NmfModel> {
    if k < 1 {
        return Err(Error::InvalidArgument("nmf needs k >= 1".into()));
    }
    if k > b.rows().min(b.cols()) {
        return Err(Error::InvalidArgument(format!(
            "nmf k={k} exceeds min(rows, cols) = {}",
            b.rows().min(b.cols())
        )));
    }
    if b.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("nmf input must be nonnegative".into()));
    }
    if b.is_all_zero() {
        return Err(Error::InvalidArgument("nmf input is entirely zero".into()));
    }

    let (mut w, mut h) = nndsvd_mean_filled(b, k, seed);
    let mut trace = vec![frobenius_loss(b, &w, &h)];
    let mut converged = false;
    let mut n_iter = 0;

    for it in 1..=max_iter {
        // H ← H ∘ (WᵀB) ⊘ (WᵀW·H)
        let wt_b = b.transpose_mul_dense(&w).transpose();
        let wt_w = w.gram();
        let denom_h = wt_w.matmul(&h);
        for (slot, (&num, &den)) in
            h.data_mut().iter_mut().zip(wt_b.data().iter().zip(denom_h.data()))
        {
            *slot *= num / (den + MU_EPS);
        }

        // W ← W ∘ (BHᵀ) ⊘ (W·HHᵀ)
        let b_ht = b.mul_dense(&h.transpose());
        let h_ht = h.mul_transpose(&h);
        let denom_w = w.matmul(&h_ht);
        for (slot, (&num, &den)) in
            w.data_mut().iter_mut().zip(b_ht.data().iter().zip(denom_w.data()))
        {
            *slot *= num / (den + MU_EPS);
        }

        let loss = frobenius_loss(b, &w, &h);
        let prev = *trace.last().expect("non-empty trace");
        trace.push(loss);
        n_iter = it;
        if (prev - loss).abs() <= tol * prev.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    Ok(NmfModel {
        doc_topic: w,
        topic_term: h,
        n_iter,
        final_loss: *trace.last().expect("non-empty trace"),
        loss_trace: trace,
        converged,
    })
}

/// ‖B − WH‖_F computed without materializing WH: the cross term runs over
/// stored entries only and the factor term stays k×k.
pub fn frobenius_loss(b: &BowMatrix, w: &Matrix<f64>, h: &Matrix<f64>) -> f64 {
    let k = w.cols();
    let mut cross = 0.0;
    for i in 0..b.rows() {
        let (cols, vals) = b.row_entries(i);
        let wi = w.row(i);
        for (&c, &v) in cols.iter().zip(vals) {
            let mut recon = 0.0;
            for t in 0..k {
                recon += wi[t] * h[(t, c as usize)];
            }
            cross += v * recon;
        }
    }
    let wt_w = w.gram();
    let h_ht = h.mul_transpose(&h);
    let factor: f64 = wt_w.data().iter().zip(h_ht.data()).map(|(&a, &b)| a * b).sum();
    (b.frobenius_sq() - 2.0 * cross + factor).max(0.0).sqrt()
}

/// Top-k singular triplets of the sparse matrix by seeded subspace
/// iteration with Rayleigh–Ritz extraction. Accuracy is what an init
/// needs, not full SVD precision.
fn sparse_topk_svd(b: &BowMatrix, k: usize, seed: RngSeed) -> (Matrix<f64>, Vec<f64>, Matrix<f64>) {
    let (n, m) = (b.rows(), b.cols());
    let block = (k + 8).min(n.min(m));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    let omega = Matrix::from_fn(m, block, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut y = b.mul_dense(&omega);
    orthonormalize_columns(&mut y);
    for _ in 0..10 {
        let mut z = b.transpose_mul_dense(&y);
        orthonormalize_columns(&mut z);
        y = b.mul_dense(&z);
        orthonormalize_columns(&mut y);
    }
    // C = YᵀB is block×m; its SVD lifts back through Y.
    let c = b.transpose_mul_dense(&y).transpose();
    let dec = svd(&c).expect("finite subspace projection");
    let u_small = Matrix::from_fn(block, k, |i, j| dec.u[(i, j)]);
    let u = y.matmul(&u_small);
    let s = dec.s.iter().take(k).copied().collect();
    let v = Matrix::from_fn(m, k, |i, j| dec.vt[(j, i)]);
    (u, s, v)
}

fn orthonormalize_columns(m: &mut Matrix<f64>) {
    let (rows, cols) = (m.rows(), m.cols());
    for j in 0..cols {
        for prev in 0..j {
            let mut dot = 0.0;
            for i in 0..rows {
                dot += m[(i, j)] * m[(i, prev)];
            }
            for i in 0..rows {
                let sub = dot * m[(i, prev)];
                m[(i, j)] -= sub;
            }
        }
        let norm = (0..rows).map(|i| m[(i, j)] * m[(i, j)]).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for i in 0..rows {
                m[(i, j)] /= norm;
            }
        } else {
            for i in 0..rows {
                m[(i, j)] = 0.0;
            }
        }
    }
}

/// Nonnegative double-SVD init: each singular triplet contributes its
/// dominant sign-consistent part; remaining zeros are raised to the
/// matrix mean so multiplicative updates keep every entry live.
fn nndsvd_mean_filled(b: &BowMatrix, k: usize, seed: RngSeed) -> (Matrix<f64>, Matrix<f64>) {
    let (n, m) = (b.rows(), b.cols());
    let (u, s, v) = sparse_topk_svd(b, k, seed);
    let mut w = Matrix::zeros(n, k);
    let mut h = Matrix::zeros(k, m);

    // Leading triplet of a nonnegative matrix can be taken nonnegative.
    let s0 = s[0].max(0.0).sqrt();
    for i in 0..n {
        w[(i, 0)] = s0 * u[(i, 0)].abs();
    }
    for j in 0..m {
        h[(0, j)] = s0 * v[(j, 0)].abs();
    }

    for p in 1..k {
        let up: Vec<f64> = (0..n).map(|i| u[(i, p)]).collect();
        let vp: Vec<f64> = (0..m).map(|j| v[(j, p)]).collect();
        let pos = |x: &[f64]| -> (Vec<f64>, f64) {
            let part: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
            let norm = part.iter().map(|&v| v * v).sum::<f64>().sqrt();
            (part, norm)
        };
        let neg = |x: &[f64]| -> (Vec<f64>, f64) {
            let part: Vec<f64> = x.iter().map(|&v| (-v).max(0.0)).collect();
            let norm = part.iter().map(|&v| v * v).sum::<f64>().sqrt();
            (part, norm)
        };
        let (u_pos, nu_pos) = pos(&up);
        let (u_neg, nu_neg) = neg(&up);
        let (v_pos, nv_pos) = pos(&vp);
        let (v_neg, nv_neg) = neg(&vp);
        let term_pos = nu_pos * nv_pos;
        let term_neg = nu_neg * nv_neg;
        let (ud, un, vd, vn, sigma_part) = if term_pos >= term_neg {
            (u_pos, nu_pos, v_pos, nv_pos, term_pos)
        } else {
            (u_neg, nu_neg, v_neg, nv_neg, term_neg)
        };
        if sigma_part > 0.0 {
            let scale = (s[p].max(0.0) * sigma_part).sqrt();
            for i in 0..n {
                w[(i, p)] = scale * ud[i] / un;
            }
            for j in 0..m {
                h[(p, j)] = scale * vd[j] / vn;
            }
        }
    }

    let fill = b.mean_all();
    for slot in w.data_mut().iter_mut().chain(h.data_mut()) {
        if *slot < MU_EPS {
            *slot = fill;
        }
    }
    (w, h)
}

/// Truncated SVD of the weighted bag-of-words matrix, via the
/// eigendecomposition of the smaller-side Gram matrix. Components beyond
/// the matrix's effective rank come back as exact zeros and the model is
/// flagged rank-deficient instead of failing.
pub fn fit_lsa(b: &BowMatrix, k: usize) -> Result<LsaModel> {
    let (n, m) = (b.rows(), b.cols());
    if k < 1 {
        return Err(Error::InvalidArgument("lsa needs k >= 1".into()));
    }
    if k > n.min(m) {
        return Err(Error::InvalidArgument(format!("lsa k={k} exceeds min(rows, cols) = {}", n.min(m))));
    }

    let term_side = m <= n;
    let gram = if term_side { b.gram_terms() } else { b.gram_docs() };
    let (eigvals, eigvecs) = eigh_symmetric(&gram)?;
    let sigmas: Vec<f64> = eigvals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    // Rank detection happens on the eigenvalue scale: the Gram pass squares
    // the spectrum, so its noise floor is ε·λ₁, not ε·σ₁.
    let cutoff = eigvals[0].max(0.0) * n.max(m) as f64 * f64::EPSILON;
    let effective = eigvals.iter().take(k).filter(|&&l| l > cutoff).count();

    let mut singular_values = vec![0.0; k];
    singular_values[..effective].copy_from_slice(&sigmas[..effective]);

    let (doc_scores, term_scores) = if term_side {
        // Eigenvectors are right singular vectors; documents project
        // through the matrix (B·v = σ·u).
        let mut v = Matrix::zeros(m, k);
        for p in 0..effective {
            for j in 0..m {
                v[(j, p)] = eigvecs[(j, p)];
            }
        }
        (b.mul_dense(&v), v)
    } else {
        // Eigenvectors are left singular vectors; terms come from
        // Bᵀ·u / σ.
        let mut u = Matrix::zeros(n, k);
        for p in 0..effective {
            for i in 0..n {
                u[(i, p)] = eigvecs[(i, p)];
            }
        }
        let mut terms = b.transpose_mul_dense(&u);
        for p in 0..effective {
            for j in 0..m {
                terms[(j, p)] /= singular_values[p];
            }
        }
        let mut docs = u;
        for p in 0..effective {
            for i in 0..n {
                docs[(i, p)] *= singular_values[p];
            }
        }
        (docs, terms)
    };

    Ok(LsaModel { doc_scores, term_scores, singular_values, effective_rank: effective })
}

impl NmfModel {
    /// Ranks each topic's terms by weight, descending. The negative pole
    /// is structurally empty: the factors are nonnegative.
    pub fn describe_topics(&self, vocab: &Vocabulary, top_k: usize) -> Result<Vec<TopicDescription>> {
        if top_k < 1 || top_k > vocab.len() {
            return Err(Error::InvalidArgument(format!(
                "top_k must be in 1..={}, got {top_k}",
                vocab.len()
            )));
        }
        Ok((0..self.topic_term.rows())
            .map(|t| {
                let scores = self.topic_term.row(t);
                TopicDescription {
                    topic_id: t,
                    positive: rank_pole(scores, vocab, top_k, true),
                    negative: Vec::new(),
                }
            })
            .collect())
    }
}

impl LsaModel {
    /// Ranks both poles of each component, same ordering rules as the
    /// main model.
    pub fn describe_topics(&self, vocab: &Vocabulary, top_k: usize) -> Result<Vec<TopicDescription>> {
        if top_k < 1 || top_k > vocab.len() {
            return Err(Error::InvalidArgument(format!(
                "top_k must be in 1..={}, got {top_k}",
                vocab.len()
            )));
        }
        Ok((0..self.term_scores.cols())
            .map(|t| {
                let scores = self.term_scores.col(t);
                TopicDescription {
                    topic_id: t,
                    positive: rank_pole(&scores, vocab, top_k, true),
                    negative: rank_pole(&scores, vocab, top_k, false),
                }
            })
            .collect())
    }
}
