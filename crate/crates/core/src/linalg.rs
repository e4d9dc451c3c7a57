//! Small dense linear algebra: row-major matrices, Householder QR,
//! Cholesky, Jacobi eigen/singular value routines.
//!
//! Everything here is sized for desk-scale problems (a few hundred
//! unknowns at most) and favours robustness over speed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row slices. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_rows_with_cols(rows, cols)
    }

    /// Like [`Matrix::from_rows`] but keeps the column count when `rows` is empty.
    pub fn from_rows_with_cols<R: AsRef<[f64]>>(rows: &[R], cols: usize) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Self {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self · v`
    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `selfᵀ · v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi != 0.0 {
                axpy(vi, self.row(i), &mut out);
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a != 0.0 {
                    let (src, dst) = (other.row(k), &mut out.data[i * other.cols..(i + 1) * other.cols]);
                    axpy(a, src, dst);
                }
            }
        }
        out
    }

    /// `selfᵀ · other`
    pub fn tr_mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.cols, other.cols);
        for k in 0..self.rows {
            let a = self.row(k);
            let b = other.row(k);
            for (i, &ai) in a.iter().enumerate() {
                if ai != 0.0 {
                    axpy(ai, b, out.row_mut(i));
                }
            }
        }
        out
    }

    /// `Zᵀ · self · Z` for a symmetric `self`.
    pub fn congruence(&self, z: &Matrix) -> Matrix {
        let hz = self.mul(z);
        let mut out = z.tr_mul(&hz);
        out.symmetrize();
        out
    }

    pub fn scale(&mut self, alpha: f64) {
        for v in &mut self.data {
            *v *= alpha;
        }
    }

    pub fn symmetrize(&mut self) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        norm_inf(&self.data)
    }

    /// Largest `|a_ij − a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// Selects rows by index into a new matrix.
    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// Selects a contiguous block of columns.
    pub fn columns(&self, start: usize, end: usize) -> Matrix {
        let mut out = Matrix::zeros(self.rows, end - start);
        for i in 0..self.rows {
            out.row_mut(i).copy_from_slice(&self.row(i)[start..end]);
        }
        out
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `y += a·x`
#[inline]
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scaled(a: &[f64], alpha: f64) -> Vec<f64> {
    a.iter().map(|x| alpha * x).collect()
}

/// Householder QR factorization `A·P = Q·R` of an `m×n` matrix, with
/// optional column pivoting. `Q` is kept explicitly (`m×m`).
#[derive(Clone, Debug)]
pub struct Qr {
    q: Matrix,
    r: Matrix,
    perm: Vec<usize>,
    rank: usize,
}

impl Qr {
    /// Plain QR without pivoting; `rank` is the number of leading
    /// diagonal entries of `R` above `rel_tol·max|R_jj|`.
    pub fn new(a: &Matrix) -> Self {
        Self::factor(a, false, 1e-12)
    }

    /// Column-pivoted QR; `rank` counts `|R_jj| > rel_tol·|R_00|`.
    pub fn pivoted(a: &Matrix, rel_tol: f64) -> Self {
        Self::factor(a, true, rel_tol)
    }

    fn factor(a: &Matrix, pivot: bool, rel_tol: f64) -> Self {
        let (m, n) = (a.rows, a.cols);
        let mut r = a.clone();
        let mut q = Matrix::identity(m);
        let mut perm: Vec<usize> = (0..n).collect();
        let steps = m.min(n);
        let mut col_norms: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| r[(i, j)] * r[(i, j)]).sum())
            .collect();
        let mut v = vec![0.0; m];
        for k in 0..steps {
            if pivot {
                let (best, _) = col_norms[k..]
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |acc, (j, &c)| if c > acc.1 { (j, c) } else { acc });
                let best = best + k;
                if best != k {
                    for i in 0..m {
                        let t = r[(i, k)];
                        r[(i, k)] = r[(i, best)];
                        r[(i, best)] = t;
                    }
                    col_norms.swap(k, best);
                    perm.swap(k, best);
                }
            }
            let mut alpha = 0.0;
            for i in k..m {
                alpha += r[(i, k)] * r[(i, k)];
            }
            let alpha = libm::sqrt(alpha);
            if alpha == 0.0 {
                continue;
            }
            let sign = if r[(k, k)] >= 0.0 { 1.0 } else { -1.0 };
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = if i < k { 0.0 } else { r[(i, k)] };
            }
            v[k] += sign * alpha;
            let vnorm2: f64 = v[k..].iter().map(|x| x * x).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // R ← (I − 2vvᵀ/vᵀv) R
            for j in k..n {
                let mut s = 0.0;
                for i in k..m {
                    s += v[i] * r[(i, j)];
                }
                let f = 2.0 * s / vnorm2;
                for i in k..m {
                    r[(i, j)] -= f * v[i];
                }
            }
            // Q ← Q (I − 2vvᵀ/vᵀv)
            for i in 0..m {
                let row = q.row_mut(i);
                let mut s = 0.0;
                for l in k..m {
                    s += row[l] * v[l];
                }
                let f = 2.0 * s / vnorm2;
                for l in k..m {
                    row[l] -= f * v[l];
                }
            }
            for i in (k + 1)..m {
                r[(i, k)] = 0.0;
            }
            if pivot {
                for (j, c) in col_norms.iter_mut().enumerate().skip(k + 1) {
                    *c -= r[(k, j)] * r[(k, j)];
                    if *c < 0.0 {
                        *c = 0.0;
                    }
                }
            }
        }
        let diag_max = (0..steps).fold(0.0_f64, |acc, k| acc.max(r[(k, k)].abs()));
        let lead = if pivot && steps > 0 { r[(0, 0)].abs() } else { diag_max };
        let rank = (0..steps)
            .take_while(|&k| lead > 0.0 && r[(k, k)].abs() > rel_tol * lead)
            .count();
        Qr { q, r, perm, rank }
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    /// Column permutation: column `j` of `A·P` is column `perm[j]` of `A`.
    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Orthonormal basis of the orthogonal complement of `range(A)`,
    /// i.e. the null space of `Aᵀ`, as the columns of an `m×(m−rank)` matrix.
    pub fn complement_basis(&self) -> Matrix {
        self.q.columns(self.rank, self.q.rows)
    }

    /// Orthonormal basis of `range(A)` (first `rank` columns of `Q`).
    pub fn range_basis(&self) -> Matrix {
        self.q.columns(0, self.rank)
    }

    /// Solves `R[..k,..k]·x = b` for the leading `k×k` upper triangle.
    pub fn solve_upper(&self, k: usize, b: &[f64]) -> Vec<f64> {
        let mut x = b[..k].to_vec();
        for i in (0..k).rev() {
            let mut s = x[i];
            for j in (i + 1)..k {
                s -= self.r[(i, j)] * x[j];
            }
            x[i] = s / self.r[(i, i)];
        }
        x
    }

    /// Solves `R[..k,..k]ᵀ·x = b`.
    pub fn solve_upper_tr(&self, k: usize, b: &[f64]) -> Vec<f64> {
        let mut x = b[..k].to_vec();
        for i in 0..k {
            let mut s = x[i];
            for j in 0..i {
                s -= self.r[(j, i)] * x[j];
            }
            x[i] = s / self.r[(i, i)];
        }
        x
    }
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Clone, Debug)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Fails (returns `None`) if a pivot drops to `min_pivot` or below.
    pub fn new(a: &Matrix, min_pivot: f64) -> Option<Self> {
        let n = a.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > min_pivot) {
                return None;
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Some(Self { l })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.l[(i, k)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= self.l[(k, i)] * y[k];
            }
            y[i] = s / self.l[(i, i)];
        }
        y
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Eigenvalues are returned in ascending order; eigenvectors are the
/// matching columns of the returned matrix.
pub fn symmetric_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    m.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = m.max_abs().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if libm::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for k in 0..n {
            vectors[(k, dst)] = v[(k, src)];
        }
    }
    (values, vectors)
}

/// Singular values of `a` (descending), by one-sided Jacobi on the
/// columns of `aᵀ` (or `a`, whichever is taller).
pub fn singular_values(a: &Matrix) -> Vec<f64> {
    let mut w = if a.rows >= a.cols { a.clone() } else { a.transpose() };
    let (m, n) = (w.rows, w.cols);
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for i in 0..m {
                    alpha += w[(i, p)] * w[(i, p)];
                    beta += w[(i, q)] * w[(i, q)];
                    gamma += w[(i, p)] * w[(i, q)];
                }
                if gamma.abs() <= 1e-15 * libm::sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let wp = w[(i, p)];
                    let wq = w[(i, q)];
                    w[(i, p)] = c * wp - s * wq;
                    w[(i, q)] = s * wp + c * wq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| libm::sqrt((0..m).map(|i| w[(i, j)] * w[(i, j)]).sum()))
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Solves a square system by LU with partial pivoting. Returns `None`
/// when a pivot falls below `tol·max|A|`.
pub fn lu_solve(a: &Matrix, b: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut x = b.to_vec();
    let scale = m.max_abs();
    if scale == 0.0 && n > 0 {
        return None;
    }
    for k in 0..n {
        let (piv, pval) = (k..n)
            .map(|i| (i, m[(i, k)].abs()))
            .fold((k, -1.0), |acc, c| if c.1 > acc.1 { c } else { acc });
        if pval <= tol * scale {
            return None;
        }
        if piv != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            x.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            if f != 0.0 {
                for j in k..n {
                    m[(i, j)] -= f * m[(k, j)];
                }
                x[i] -= f * x[k];
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= m[(i, j)] * x[j];
        }
        x[i] = s / m[(i, i)];
    }
    Some(x)
}
