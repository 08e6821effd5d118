//! Singular value decomposition by one-sided Jacobi rotations, and the
//! Moore-Penrose pseudo-inverse built on top of it.

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;

const MAX_SWEEPS: usize = 60;

#[derive(Clone, Debug)]
pub struct Svd<F> {
    /// Left singular vectors, `rows × min(rows, cols)`, orthonormal columns.
    pub u: Matrix<F>,
    /// Singular values, nonincreasing and nonnegative.
    pub s: Vec<F>,
    /// Right singular vectors transposed, `min(rows, cols) × cols`, orthonormal rows.
    pub vt: Matrix<F>,
}

/// Thin singular value decomposition: `m == U · diag(s) · Vt`.
///
/// One-sided Jacobi iteration rotates column pairs until all columns are
/// mutually orthogonal, which computes small singular values to high
/// relative accuracy. Columns whose norm falls below
/// `max(rows, cols) · ε · s_max` are treated as zero and their left
/// vectors completed to an orthonormal basis, so rank-deficient and
/// all-zero inputs are well defined.
pub fn svd<F: Scalar>(m: &Matrix<F>) -> Result<Svd<F>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("svd input".into()));
    }
    if m.rows() < m.cols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd { u: t.vt.transpose(), s: t.s, vt: t.u.transpose() });
    }

    let n = m.rows();
    let d = m.cols();
    let mut a = m.clone();
    let mut v: Matrix<F> = Matrix::identity(d);
    if d == 0 {
        return Ok(Svd { u: Matrix::zeros(n, 0), s: Vec::new(), vt: Matrix::zeros(0, 0) });
    }

    let ortho_tol = F::epsilon() * F::of(8.0);
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = 0usize;
        for p in 0..d.saturating_sub(1) {
            for q in (p + 1)..d {
                let mut alpha = F::zero();
                let mut beta = F::zero();
                let mut gamma = F::zero();
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    alpha += ap * ap;
                    beta += aq * aq;
                    gamma += ap * aq;
                }
                if alpha == F::zero() || beta == F::zero() {
                    continue;
                }
                if gamma.abs() <= ortho_tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated += 1;
                let zeta = (beta - alpha) / (F::of(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (F::one() + zeta * zeta).sqrt());
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = c * t;
                for i in 0..n {
                    let ap = a[(i, p)];
                    let aq = a[(i, q)];
                    a[(i, p)] = c * ap - s * aq;
                    a[(i, q)] = s * ap + c * aq;
                }
                for i in 0..d {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if rotated == 0 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { what: "svd", limit: MAX_SWEEPS });
    }

    let mut norms: Vec<F> = (0..d).map(|j| norm_col(&a, j)).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap_or(std::cmp::Ordering::Equal));

    let s_max = norms[order[0]];
    let zero_tol = F::of(n.max(d) as f64) * F::epsilon() * s_max;

    let mut u = Matrix::zeros(n, d);
    let mut vt = Matrix::zeros(d, d);
    let mut s = vec![F::zero(); d];
    let mut zeroed: Vec<usize> = Vec::new();
    for (jn, &jo) in order.iter().enumerate() {
        if norms[jo] > zero_tol && norms[jo] > F::zero() {
            s[jn] = norms[jo];
            for i in 0..n {
                u[(i, jn)] = a[(i, jo)] / norms[jo];
            }
        } else {
            norms[jo] = F::zero();
            zeroed.push(jn);
        }
        for i in 0..d {
            vt[(jn, i)] = v[(i, jo)];
        }
    }
    complete_basis(&mut u, &zeroed);
    for j in 0..d {
        let mut flip = false;
        {
            let mut best = 0usize;
            let mut best_abs = F::zero();
            for i in 0..n {
                let ab = u[(i, j)].abs();
                if ab > best_abs {
                    best_abs = ab;
                    best = i;
                }
            }
            if u[(best, j)] < F::zero() {
                flip = true;
            }
        }
        if flip {
            u.negate_col(j);
            vt.negate_row(j);
        }
    }

    Ok(Svd { u, s, vt })
}

fn norm_col<F: Scalar>(a: &Matrix<F>, j: usize) -> F {
    let mut acc = F::zero();
    for i in 0..a.rows() {
        let v = a[(i, j)];
        acc += v * v;
    }
    acc.sqrt()
}

/// Fills the listed (currently zero) columns of `u` with unit vectors
/// orthogonal to all other columns, by Gram-Schmidt against the standard basis.
fn complete_basis<F: Scalar>(u: &mut Matrix<F>, zeroed: &[usize]) {
    let n = u.rows();
    let d = u.cols();
    let mut next_candidate = 0usize;
    for &j in zeroed {
        while next_candidate < n {
            let mut col = vec![F::zero(); n];
            col[next_candidate] = F::one();
            next_candidate += 1;
            for other in 0..d {
                if other == j {
                    continue;
                }
                let proj = (0..n).map(|i| u[(i, other)] * col[i]).sum::<F>();
                for (i, c) in col.iter_mut().enumerate() {
                    *c -= proj * u[(i, other)];
                }
            }
            let norm = dot(&col, &col).sqrt();
            if norm > F::of(0.5) {
                for (i, c) in col.iter().enumerate() {
                    u[(i, j)] = *c / norm;
                }
                break;
            }
        }
    }
}

/// Moore-Penrose pseudo-inverse. The zero matrix maps to the zero matrix.
pub fn pseudo_inverse<F: Scalar>(a: &Matrix<F>) -> Result<Matrix<F>> {
    let decomp = svd(a)?;
    let r = decomp.s.len();
    let cutoff = if r == 0 {
        F::zero()
    } else {
        decomp.s[0] * F::of(a.rows().max(a.cols()) as f64) * F::epsilon()
    };
    // pinv = V · diag(1/s) · Uᵀ
    let mut out = Matrix::zeros(a.cols(), a.rows());
    for t in 0..r {
        if decomp.s[t] <= cutoff || decomp.s[t] == F::zero() {
            continue;
        }
        let inv = F::one() / decomp.s[t];
        for i in 0..a.cols() {
            let vi = decomp.vt[(t, i)] * inv;
            if vi == F::zero() {
                continue;
            }
            for j in 0..a.rows() {
                out[(i, j)] += vi * decomp.u[(j, t)];
            }
        }
    }
    Ok(out)
}
