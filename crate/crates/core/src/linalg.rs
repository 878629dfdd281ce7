//! Small dense linear algebra: row-major matrices, LU with partial
//! pivoting, Householder QR and one-sided Jacobi singular values.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ y`.
    pub fn matvec_t(&self, y: &[f64]) -> Vec<f64> {
        assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                axpy(yi, self.row(i), &mut out);
            }
        }
        out
    }

    /// Columns selected by `idx`, in that order.
    pub fn select_columns(&self, idx: &[usize]) -> Self {
        let mut m = Self::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            let r = self.row(i);
            for (k, &j) in idx.iter().enumerate() {
                m.data[i * idx.len() + k] = r[j];
            }
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// Inner product with four independent accumulators, which lets the
/// compiler vectorize the loop.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in (&mut ca).zip(&mut cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn norm(x: &[f64]) -> f64 {
    libm::sqrt(dot(x, x))
}

/// LU factorization `PA = LU` of a square matrix.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Mat,
    perm: Vec<usize>,
}

impl Lu {
    /// Factors `a`, failing if a pivot falls below `rel_tol` times the
    /// largest entry of `a`.
    pub fn new(a: &Mat, rel_tol: f64) -> Result<Self> {
        assert_eq!(a.rows, a.cols, "LU needs a square matrix");
        if a.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = a.rows;
        let scale = a.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) = (k..n).map(|i| (i, lu.get(i, k).abs())).fold((k, -1.0), |b, c| if c.1 > b.1 { c } else { b });
            if pv <= rel_tol * scale || pv == 0.0 {
                return Err(Error::SingularSystem { pivot: pv, column: k });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let d = lu.get(k, k);
            for i in k + 1..n {
                let f = lu.get(i, k) / d;
                lu.set(i, k, f);
                if f != 0.0 {
                    for j in k + 1..n {
                        let v = lu.get(i, j) - f * lu.get(k, j);
                        lu.set(i, j, v);
                    }
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu.get(i, i);
        }
        x
    }
}

/// Householder QR of a tall matrix (`rows ≥ cols`), stored compactly.
#[derive(Debug, Clone)]
pub struct Qr {
    /// Column-major copy holding `R` above the diagonal and the
    /// Householder vectors below it.
    a: Vec<f64>,
    rows: usize,
    cols: usize,
    rdiag: Vec<f64>,
}

impl Qr {
    pub fn new(m: &Mat) -> Result<Self> {
        let (rows, cols) = (m.rows, m.cols);
        if rows < cols {
            return Err(Error::InvalidArgument("QR needs rows >= cols"));
        }
        let mut a = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                a[j * rows + i] = m.get(i, j);
            }
        }
        let mut rdiag = vec![0.0; cols];
        for k in 0..cols {
            let (head, tail) = a.split_at_mut((k + 1) * rows);
            let col = &mut head[k * rows..];
            let nrm = norm(&col[k..]);
            if nrm == 0.0 {
                rdiag[k] = 0.0;
                continue;
            }
            let alpha = if col[k] > 0.0 { -nrm } else { nrm };
            col[k] -= alpha;
            let vnorm2 = dot(&col[k..], &col[k..]);
            for j in 0..cols - k - 1 {
                let cj = &mut tail[j * rows..(j + 1) * rows];
                let f = 2.0 * dot(&col[k..], &cj[k..]) / vnorm2;
                for i in k..rows {
                    cj[i] -= f * col[i];
                }
            }
            rdiag[k] = alpha;
        }
        Ok(Self { a, rows, cols, rdiag })
    }

    fn v(&self, k: usize) -> &[f64] {
        &self.a[k * self.rows + k..(k + 1) * self.rows]
    }

    fn r(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.rdiag[i]
        } else {
            self.a[j * self.rows + i]
        }
    }

    /// Applies `Qᵀ` in place.
    pub fn apply_qt(&self, y: &mut [f64]) {
        for k in 0..self.cols {
            let v = self.v(k);
            let vn = dot(v, v);
            if vn == 0.0 {
                continue;
            }
            let f = 2.0 * dot(v, &y[k..]) / vn;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
    }

    /// Applies `Q` in place.
    pub fn apply_q(&self, y: &mut [f64]) {
        for k in (0..self.cols).rev() {
            let v = self.v(k);
            let vn = dot(v, v);
            if vn == 0.0 {
                continue;
            }
            let f = 2.0 * dot(v, &y[k..]) / vn;
            for (yi, vi) in y[k..].iter_mut().zip(v) {
                *yi -= f * vi;
            }
        }
    }

    /// Smallest |R_kk| relative to the largest.
    pub fn rcond_estimate(&self) -> f64 {
        let mx = self.rdiag.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let mn = self.rdiag.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
        if mx == 0.0 {
            0.0
        } else {
            mn / mx
        }
    }

    /// Least-squares solution of `min ‖A x − b‖₂`.
    pub fn solve_ls(&self, b: &[f64]) -> Result<Vec<f64>> {
        let mut y = b.to_vec();
        self.apply_qt(&mut y);
        self.solve_r(&y[..self.cols])
    }

    /// Solves `R x = c`.
    pub fn solve_r(&self, c: &[f64]) -> Result<Vec<f64>> {
        let n = self.cols;
        let mut x = c[..n].to_vec();
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.r(i, j) * x[j];
            }
            let d = self.r(i, i);
            if d == 0.0 {
                return Err(Error::SingularSystem { pivot: 0.0, column: i });
            }
            x[i] = s / d;
        }
        Ok(x)
    }

    /// Solves `Rᵀ z = c`.
    pub fn solve_rt(&self, c: &[f64]) -> Result<Vec<f64>> {
        let n = self.cols;
        let mut z = c[..n].to_vec();
        for i in 0..n {
            let mut s = z[i];
            for j in 0..i {
                s -= self.r(j, i) * z[j];
            }
            let d = self.r(i, i);
            if d == 0.0 {
                return Err(Error::SingularSystem { pivot: 0.0, column: i });
            }
            z[i] = s / d;
        }
        Ok(z)
    }

    /// `Q [z; 0]`, the minimum-norm `w` with `Aᵀ w = Rᵀ z`.
    pub fn q_times(&self, z: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.rows];
        y[..self.cols].copy_from_slice(&z[..self.cols]);
        self.apply_q(&mut y);
        y
    }
}

/// Singular values of `m`, descending, by one-sided Jacobi rotations.
pub fn singular_values(m: &Mat) -> Result<Vec<f64>> {
    if m.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    // Orthogonalize the columns of the taller orientation.
    let a = if m.rows >= m.cols { m.clone() } else { m.transpose() };
    let (rows, cols) = (a.rows, a.cols);
    let mut c: Vec<Vec<f64>> = (0..cols).map(|j| a.column(j)).collect();
    let mut norms: Vec<f64> = c.iter().map(|v| dot(v, v)).collect();
    let eps = 1e-15;
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let alpha = norms[p];
                let beta = norms[q];
                let gamma = dot(&c[p], &c[q]);
                if gamma == 0.0 || gamma.abs() <= eps * libm::sqrt(alpha * beta) {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + libm::sqrt(1.0 + zeta * zeta));
                let cs = 1.0 / libm::sqrt(1.0 + t * t);
                let sn = cs * t;
                let (lo, hi) = c.split_at_mut(q);
                let (cp, cq) = (&mut lo[p], &mut hi[0]);
                for i in 0..rows {
                    let x = cp[i];
                    let y = cq[i];
                    cp[i] = cs * x - sn * y;
                    cq[i] = sn * x + cs * y;
                }
                norms[p] = dot(cp, cp);
                norms[q] = dot(cq, cq);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut s: Vec<f64> = norms.iter().map(|v| libm::sqrt(*v)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves() {
        let a = Mat::from_rows(3, 3, vec![0.0, 2.0, 1.0, 1.0, 1.0, 0.0, 3.0, 0.0, 1.0]);
        let x = Lu::new(&a, 1e-12).unwrap().solve(&[3.0, 2.0, 4.0]);
        for (u, v) in x.iter().zip([1.0, 1.0, 1.0]) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn lu_rejects_singular() {
        let a = Mat::from_rows(2, 2, vec![1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(Lu::new(&a, 1e-12), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn qr_least_squares_and_transpose_solve() {
        let a = Mat::from_rows(4, 2, vec![1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let qr = Qr::new(&a).unwrap();
        let x = qr.solve_ls(&[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
        // w = Q R^{-T} s satisfies A^T w = s.
        let s = [1.0, -1.0];
        let w = qr.q_times(&qr.solve_rt(&s).unwrap());
        let back = a.matvec_t(&w);
        assert!((back[0] - 1.0).abs() < 1e-13 && (back[1] + 1.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_identity_and_rank_deficient() {
        let s = singular_values(&Mat::identity(4)).unwrap();
        assert!(s.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let m = Mat::from_rows(3, 2, vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
        let s = singular_values(&m).unwrap();
        assert!((s[0] - libm::sqrt(28.0)).abs() < 1e-13);
        assert!(s[1] < 1e-10);
    }
}
