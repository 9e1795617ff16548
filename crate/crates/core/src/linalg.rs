//! Small dense linear algebra kernels.
//!
//! Everything here works on column-major [`Matrix`] values. The problem sizes
//! are modest (candidate supports of a few dozen columns, a few hundred rows),
//! so the routines favour accuracy and simplicity: Householder QR for least
//! squares and rank checks, Cholesky for SPD solves and whitening, and cyclic
//! Jacobi sweeps for symmetric eigenvalues and singular values.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{abs, hypot, sqrt};

/// Dense column-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds a matrix from column-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major buffer has wrong length");
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major storage.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major buffer has wrong length");
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, data[i * cols + j]);
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    ///
    /// Panics if the columns differ in length.
    pub fn from_columns(rows: usize, columns: &[Vec<f64>]) -> Self {
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            assert_eq!(c.len(), rows, "column length mismatch");
            data.extend_from_slice(c);
        }
        Self { rows, cols: columns.len(), data }
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn as_col_major(&self) -> &[f64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copies the listed columns, in order, into a new matrix.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            data.extend_from_slice(self.col(j));
        }
        Matrix { rows: self.rows, cols: indices.len(), data }
    }

    /// Returns `[1 | self]`.
    pub fn with_leading_ones(&self) -> Matrix {
        let mut data = Vec::with_capacity(self.rows * (self.cols + 1));
        data.resize(self.rows, 1.0);
        data.extend_from_slice(&self.data);
        Matrix { rows: self.rows, cols: self.cols + 1, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * v`.
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for (j, &vj) in v.iter().enumerate() {
            if vj != 0.0 {
                axpy(vj, self.col(j), &mut out);
            }
        }
        out
    }

    /// `selfᵀ * v`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.rows);
        (0..self.cols).map(|j| dot(self.col(j), v)).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for k in 0..self.cols {
                let b = other.get(k, j);
                if b != 0.0 {
                    axpy(b, self.col(k), dst);
                }
            }
        }
        out
    }

    /// `selfᵀ diag(w) self`, symmetric by construction.
    pub fn weighted_gram(&self, w: &[f64]) -> Matrix {
        assert_eq!(w.len(), self.rows);
        let d = self.cols;
        let mut g = Matrix::zeros(d, d);
        let mut scratch = vec![0.0; self.rows];
        for a in 0..d {
            for ((s, &x), &wi) in scratch.iter_mut().zip(self.col(a)).zip(w) {
                *s = x * wi;
            }
            for b in a..d {
                let v = dot(&scratch, self.col(b));
                g.set(a, b, v);
                g.set(b, a, v);
            }
        }
        g
    }

    /// `selfᵀ self`.
    pub fn gram(&self) -> Matrix {
        let d = self.cols;
        let mut g = Matrix::zeros(d, d);
        for a in 0..d {
            for b in a..d {
                let v = dot(self.col(a), self.col(b));
                g.set(a, b, v);
                g.set(b, a, v);
            }
        }
        g
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| f64::max(m, abs(a - b)))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for j in 0..self.cols {
            for i in 0..j {
                if abs(self.get(i, j) - self.get(j, i)) > tol {
                    return false;
                }
            }
        }
        true
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut chunks_a = a.chunks_exact(4);
    let mut chunks_b = b.chunks_exact(4);
    let mut acc = [0.0f64; 4];
    for (ca, cb) in (&mut chunks_a).zip(&mut chunks_b) {
        acc[0] += ca[0] * cb[0];
        acc[1] += ca[1] * cb[1];
        acc[2] += ca[2] * cb[2];
        acc[3] += ca[3] * cb[3];
    }
    let mut tail = 0.0;
    for (x, y) in chunks_a.remainder().iter().zip(chunks_b.remainder()) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, &x| f64::max(m, abs(x)))
}

/// Lower-triangular Cholesky factor of an SPD matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factors `a = L Lᵀ`. Returns `None` when a pivot is not strictly
    /// positive (the matrix is not numerically positive definite).
    pub fn new(a: &Matrix) -> Option<Self> {
        let n = a.nrows();
        assert_eq!(n, a.ncols(), "Cholesky needs a square matrix");
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut diag = a.get(j, j);
            for k in 0..j {
                let v = l.get(j, k);
                diag -= v * v;
            }
            if !(diag > 0.0) || !diag.is_finite() {
                return None;
            }
            let ljj = sqrt(diag);
            l.set(j, j, ljj);
            for i in j + 1..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l.get(i, k) * l.get(j, k);
                }
                l.set(i, j, s / ljj);
            }
        }
        Some(Self { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    /// Solves `L x = b` in place.
    pub fn forward_in_place(&self, b: &mut [f64]) {
        let n = self.l.nrows();
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l.get(i, k) * b[k];
            }
            b[i] = s / self.l.get(i, i);
        }
    }

    /// Solves `Lᵀ x = b` in place.
    pub fn backward_in_place(&self, b: &mut [f64]) {
        let n = self.l.nrows();
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= self.l.get(k, i) * b[k];
            }
            b[i] = s / self.l.get(i, i);
        }
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.forward_in_place(&mut x);
        self.backward_in_place(&mut x);
        x
    }

    /// Returns `L⁻¹ S L⁻ᵀ` for symmetric `S`, symmetrized.
    pub fn whiten(&self, s: &Matrix) -> Matrix {
        let n = self.l.nrows();
        assert_eq!((s.nrows(), s.ncols()), (n, n));
        // Y = L⁻¹ S, column by column.
        let mut y = s.clone();
        for j in 0..n {
            self.forward_in_place(y.col_mut(j));
        }
        // C = L⁻¹ Yᵀ = L⁻¹ S L⁻ᵀ.
        let mut c = y.transpose();
        for j in 0..n {
            self.forward_in_place(c.col_mut(j));
        }
        for j in 0..n {
            for i in 0..j {
                let v = 0.5 * (c.get(i, j) + c.get(j, i));
                c.set(i, j, v);
                c.set(j, i, v);
            }
        }
        c
    }

    pub fn log_det(&self) -> f64 {
        (0..self.l.nrows()).map(|i| 2.0 * crate::math::ln(self.l.get(i, i))).sum()
    }
}

/// Householder QR of a tall matrix (`rows ≥ cols`).
#[derive(Debug, Clone)]
pub struct Qr {
    /// R in the upper triangle, Householder vectors below the diagonal.
    packed: Matrix,
    /// Scalar factors of the Householder reflectors.
    betas: Vec<f64>,
}

impl Qr {
    pub fn new(a: &Matrix) -> Self {
        let (m, n) = (a.nrows(), a.ncols());
        assert!(m >= n, "QR needs rows >= cols");
        let mut packed = a.clone();
        let mut betas = vec![0.0; n];
        for k in 0..n {
            let col = &mut packed.col_mut(k)[k..];
            let norm = sqrt(dot(col, col));
            if norm == 0.0 {
                continue;
            }
            let alpha = if col[0] > 0.0 { -norm } else { norm };
            let v0 = col[0] - alpha;
            // v = [1, col[1..]/v0], beta = -v0/alpha
            for x in col[1..].iter_mut() {
                *x /= v0;
            }
            col[0] = alpha;
            let beta = -v0 / alpha;
            betas[k] = beta;
            for j in k + 1..n {
                let (head, tail) = packed.data.split_at_mut(j * m);
                let v = &head[k * m + k..k * m + m];
                let target = &mut tail[k..m];
                let s = target[0] + dot(&v[1..], &target[1..]);
                let f = beta * s;
                target[0] -= f;
                axpy(-f, &v[1..], &mut target[1..]);
            }
        }
        Self { packed, betas }
    }

    /// Upper-triangular `R` (cols × cols).
    pub fn r(&self) -> Matrix {
        let n = self.packed.ncols();
        let mut r = Matrix::zeros(n, n);
        for j in 0..n {
            for i in 0..=j {
                r.set(i, j, self.packed.get(i, j));
            }
        }
        r
    }

    /// Singular values of the factored matrix (descending).
    pub fn singular_values(&self) -> Vec<f64> {
        one_sided_jacobi(self.r())
    }

    /// Applies `Qᵀ` to `b` in place.
    pub fn apply_qt(&self, b: &mut [f64]) {
        let (m, n) = (self.packed.nrows(), self.packed.ncols());
        assert_eq!(b.len(), m);
        for k in 0..n {
            let beta = self.betas[k];
            if beta == 0.0 {
                continue;
            }
            let v = &self.packed.col(k)[k..];
            let target = &mut b[k..];
            let s = target[0] + dot(&v[1..], &target[1..]);
            let f = beta * s;
            target[0] -= f;
            axpy(-f, &v[1..], &mut target[1..]);
        }
    }

    /// Least-squares solution of `A x ≈ b`. Assumes `A` has full column rank.
    pub fn solve_least_squares(&self, b: &[f64]) -> Vec<f64> {
        let n = self.packed.ncols();
        let mut qtb = b.to_vec();
        self.apply_qt(&mut qtb);
        let mut x = qtb[..n].to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.packed.get(i, k) * x[k];
            }
            x[i] = s / self.packed.get(i, i);
        }
        x
    }
}

/// Singular values of `a` (descending), via Householder QR followed by
/// one-sided Jacobi on the triangular factor.
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    if a.nrows() >= a.ncols() {
        one_sided_jacobi(Qr::new(a).r())
    } else {
        one_sided_jacobi(Qr::new(&a.transpose()).r())
    }
}

fn one_sided_jacobi(mut u: Matrix) -> Vec<f64> {
    let n = u.ncols();
    let m = u.nrows();
    const EPS: f64 = 1e-15;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(u.col(p), u.col(p));
                let beta = dot(u.col(q), u.col(q));
                let gamma = dot(u.col(p), u.col(q));
                if gamma == 0.0 || abs(gamma) <= EPS * sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (abs(zeta) + hypot(1.0, zeta));
                let c = 1.0 / hypot(1.0, t);
                let s = c * t;
                for i in 0..m {
                    let up = u.get(i, p);
                    let uq = u.get(i, q);
                    u.set(i, p, c * up - s * uq);
                    u.set(i, q, s * up + c * uq);
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n).map(|j| sqrt(dot(u.col(j), u.col(j)))).collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Eigenvalues of a symmetric matrix (ascending), cyclic Jacobi.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut total = 0.0;
        for j in 0..n {
            for i in 0..n {
                let v = m.get(i, j) * m.get(i, j);
                total += v;
                if i != j {
                    off += v;
                }
            }
        }
        if off <= 1e-30 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t =
                    if theta >= 0.0 { 1.0 / (theta + hypot(1.0, theta)) } else { -1.0 / (-theta + hypot(1.0, theta)) };
                let c = 1.0 / hypot(1.0, t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                m.set(p, q, 0.0);
                m.set(q, p, 0.0);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m.get(i, i)).collect();
    ev.sort_by(f64::total_cmp);
    ev
}
