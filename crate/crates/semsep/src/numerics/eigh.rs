//! Symmetric eigendecomposition via Householder tridiagonalization
//! followed by implicit-shift QL iteration (the classic tred2/tql2 pair).

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

const MAX_QL_ITER: usize = 100;

/// Eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in descending order and the matching eigenvectors
/// as columns of an orthogonal matrix. Each eigenvector's sign is fixed so
/// its largest-magnitude entry is positive, which makes results
/// deterministic. Only the given matrix's values are read; symmetry is the
/// caller's responsibility.
pub fn eigh_symmetric<F: Scalar>(m: &Matrix<F>) -> Result<(Vec<F>, Matrix<F>)> {
    assert_eq!(m.rows(), m.cols(), "eigh_symmetric needs a square matrix");
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), Matrix::zeros(0, 0)));
    }
    // The working buffer holds the transform with candidate eigenvectors
    // as rows rather than columns: every inner loop in the reduction and
    // QL sweeps then walks memory contiguously instead of striding by n,
    // which dominates the runtime for matrices in the hundreds of rows.
    let mut v = m.clone();
    let mut d = vec![F::zero(); n];
    let mut e = vec![F::zero(); n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e)?;

    // tql2 leaves eigenvalues unordered; sort descending, carrying vectors.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<F> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (jn, &jo) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, jn)] = v[(jo, i)];
        }
    }
    for j in 0..n {
        fix_column_sign(&mut vectors, j);
    }
    Ok((values, vectors))
}

pub(crate) fn fix_column_sign<F: Scalar>(m: &mut Matrix<F>, j: usize) {
    let mut best = 0usize;
    let mut best_abs = F::zero();
    for i in 0..m.rows() {
        let a = m[(i, j)].abs();
        if a > best_abs {
            best_abs = a;
            best = i;
        }
    }
    if m[(best, j)] < F::zero() {
        m.negate_col(j);
    }
}

/// Householder reduction to tridiagonal form, accumulating the transform
/// in `v` with basis vectors stored as rows.
fn tred2<F: Scalar>(v: &mut Matrix<F>, d: &mut [F], e: &mut [F]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[(j, n - 1)];
    }

    for i in (1..n).rev() {
        let mut scale = F::zero();
        let mut h = F::zero();
        for item in d.iter().take(i) {
            scale += item.abs();
        }
        if scale == F::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(j, i - 1)];
                v[(j, i)] = F::zero();
                v[(i, j)] = F::zero();
            }
        } else {
            for item in d.iter_mut().take(i) {
                *item /= scale;
                h += *item * *item;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > F::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for item in e.iter_mut().take(i) {
                *item = F::zero();
            }

            for j in 0..i {
                f = d[j];
                v[(i, j)] = f;
                let row_j = &v.row(j)[..i];
                g = e[j] + row_j[j] * f;
                for ((&vjk, &dk), ek) in
                    row_j[j + 1..].iter().zip(&d[j + 1..i]).zip(&mut e[j + 1..i])
                {
                    g += vjk * dk;
                    *ek += vjk * f;
                }
                e[j] = g;
            }
            f = F::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                let g = e[j];
                let row_j = &mut v.row_mut(j)[j..i];
                for ((vjk, &ek), &dk) in row_j.iter_mut().zip(&e[j..i]).zip(&d[j..i]) {
                    *vjk -= f * ek + g * dk;
                }
                d[j] = v[(j, i - 1)];
                v[(j, i)] = F::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate transformations.
    for i in 0..(n - 1) {
        v[(i, n - 1)] = v[(i, i)];
        v[(i, i)] = F::one();
        let h = d[i + 1];
        if h != F::zero() {
            // Row i+1 holds the Householder vector; rows 0..=i receive the
            // rank-one update. Splitting keeps both sides as plain slices.
            let (rows_j, row_hh) = v.data_mut().split_at_mut((i + 1) * n);
            let row_hh = &row_hh[..=i];
            for (item, &vk) in d.iter_mut().zip(row_hh) {
                *item = vk / h;
            }
            for j in 0..=i {
                let row_j = &mut rows_j[j * n..j * n + i + 1];
                let mut g = F::zero();
                for (&hk, &vjk) in row_hh.iter().zip(row_j.iter()) {
                    g += hk * vjk;
                }
                for (vjk, &dk) in row_j.iter_mut().zip(&d[..=i]) {
                    *vjk -= g * dk;
                }
            }
        }
        for k in 0..=i {
            v[(i + 1, k)] = F::zero();
        }
    }
    for j in 0..n {
        d[j] = v[(j, n - 1)];
        v[(j, n - 1)] = F::zero();
    }
    v[(n - 1, n - 1)] = F::one();
    e[0] = F::zero();
}

/// Implicit-shift QL iteration on the tridiagonal form.
fn tql2<F: Scalar>(v: &mut Matrix<F>, d: &mut [F], e: &mut [F]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = F::zero();

    let mut f = F::zero();
    let mut tst1 = F::zero();
    let eps = F::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m >= n {
            m = n - 1;
        }

        if m > l {
            let mut iter = 0usize;
            loop {
                iter += 1;
                if iter > MAX_QL_ITER {
                    return Err(Error::NonConvergence { what: "eigh_symmetric", limit: MAX_QL_ITER });
                }

                let g = d[l];
                let mut p = (d[l + 1] - g) / (F::of(2.0) * e[l]);
                let mut r = p.hypot(F::one());
                if p < F::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for item in d.iter_mut().take(n).skip(l + 2) {
                    *item -= h;
                }
                f += h;

                p = d[m];
                let mut c = F::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = F::zero();
                let mut s2 = F::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    let (row_i, row_i1) =
                        v.data_mut()[i * n..(i + 2) * n].split_at_mut(n);
                    for (xi, xi1) in row_i.iter_mut().zip(row_i1.iter_mut()) {
                        h = *xi1;
                        *xi1 = s * *xi + c * h;
                        *xi = c * *xi - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = F::zero();
    }
    Ok(())
}
