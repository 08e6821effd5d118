//! Dense row-major matrices generic over the scalar type.

use crate::scalar::Scalar;
use std::ops::{Index, IndexMut};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Scalar> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<F>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [F] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self.data[i * self.cols + l];
                if a == F::zero() {
                    continue;
                }
                let rrow = &rhs.data[l * rhs.cols..(l + 1) * rhs.cols];
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &r) in orow.iter_mut().zip(rrow) {
                    *o += a * r;
                }
            }
        }
        out
    }

    /// `self · rhsᵀ`; both operands are traversed by row, which keeps the
    /// inner loops on contiguous memory. Four output dots run per pass so
    /// the accumulator chains overlap instead of serializing on add
    /// latency; each dot still sums left to right.
    pub fn mul_transpose(&self, rhs: &Self) -> Self {
        assert_eq!(self.cols, rhs.cols, "mul_transpose shape mismatch");
        let mut out = Self::zeros(self.rows, rhs.rows);
        let m = rhs.rows;
        for i in 0..self.rows {
            let a = self.row(i);
            let orow = &mut out.data[i * m..(i + 1) * m];
            let mut j = 0;
            while j + 4 <= m {
                let b0 = rhs.row(j);
                let b1 = rhs.row(j + 1);
                let b2 = rhs.row(j + 2);
                let b3 = rhs.row(j + 3);
                let mut acc = [F::zero(); 4];
                for ((((&x, &y0), &y1), &y2), &y3) in
                    a.iter().zip(b0).zip(b1).zip(b2).zip(b3)
                {
                    acc[0] += x * y0;
                    acc[1] += x * y1;
                    acc[2] += x * y2;
                    acc[3] += x * y3;
                }
                orow[j..j + 4].copy_from_slice(&acc);
                j += 4;
            }
            for (j, o) in orow.iter_mut().enumerate().skip(j) {
                let mut acc = F::zero();
                for (&x, &y) in a.iter().zip(rhs.row(j)) {
                    acc += x * y;
                }
                *o = acc;
            }
        }
        out
    }

    /// `selfᵀ · rhs`.
    pub fn transpose_mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.rows, rhs.rows, "transpose_mul shape mismatch");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for l in 0..self.rows {
            let a = self.row(l);
            let b = rhs.row(l);
            for (p, &ap) in a.iter().enumerate() {
                if ap == F::zero() {
                    continue;
                }
                let orow = &mut out.data[p * rhs.cols..(p + 1) * rhs.cols];
                for (o, &bq) in orow.iter_mut().zip(b) {
                    *o += ap * bq;
                }
            }
        }
        out
    }

    /// `selfᵀ · self`, exploiting symmetry.
    pub fn gram(&self) -> Self {
        let d = self.cols;
        let mut out = Self::zeros(d, d);
        for i in 0..self.rows {
            let r = self.row(i);
            for (p, &ap) in r.iter().enumerate() {
                if ap == F::zero() {
                    continue;
                }
                let orow = &mut out.data[p * d..(p + 1) * d];
                for (o, &aq) in orow[p..].iter_mut().zip(&r[p..]) {
                    *o += ap * aq;
                }
            }
        }
        for p in 0..d {
            for q in (p + 1)..d {
                out[(q, p)] = out[(p, q)];
            }
        }
        out
    }

    pub fn col_means(&self) -> Vec<F> {
        let mut m = vec![F::zero(); self.cols];
        for i in 0..self.rows {
            for (acc, &v) in m.iter_mut().zip(self.row(i)) {
                *acc += v;
            }
        }
        let n = F::of(self.rows as f64);
        for v in &mut m {
            *v = *v / n;
        }
        m
    }

    /// Subtracts `shift` from every row.
    pub fn center_rows(&self, shift: &[F]) -> Self {
        assert_eq!(shift.len(), self.cols, "center_rows length mismatch");
        let mut out = self.clone();
        for i in 0..self.rows {
            for (v, &s) in out.row_mut(i).iter_mut().zip(shift) {
                *v -= s;
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        let data = self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scaled(&self, s: F) -> Self {
        let data = self.data.iter().map(|&v| v * s).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn map(&self, f: impl Fn(F) -> F) -> Self {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn frobenius_norm(&self) -> F {
        self.data.iter().map(|&v| v * v).sum::<F>().sqrt()
    }

    pub fn max_abs(&self) -> F {
        self.data.iter().fold(F::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> F {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(F::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = self[(i, j)];
            self[(i, j)] = -v;
        }
    }

    pub fn negate_row(&mut self, i: usize) {
        for v in self.row_mut(i) {
            *v = -*v;
        }
    }

    pub fn widen(&self) -> Matrix<f64> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| v.widen()).collect(),
        }
    }

    pub fn narrow_from(src: &Matrix<f64>) -> Self {
        Matrix {
            rows: src.rows,
            cols: src.cols,
            data: src.data.iter().map(|&v| F::of(v)).collect(),
        }
    }
}

impl<F: Scalar> Index<(usize, usize)> for Matrix<F> {
    type Output = F;

    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F: Scalar> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm2<F: Scalar>(a: &[F]) -> F {
    dot(a, a).sqrt()
}
