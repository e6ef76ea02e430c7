//! Dense complex linear algebra used by the effective-channel operator and
//! the MMSE detector.
//!
//! A small self-contained layer: a column-major complex matrix, gemm wrappers
//! over SIMD kernels, a blocked Hermitian Cholesky solve, and a symmetric
//! tridiagonal eigensolver (implicit-shift QL with eigenvector accumulation).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use matrixmultiply::{zgemm, CGemmOption};
#[allow(unused_imports)]
use num_traits::Float;

use crate::C64;

/// Column-major complex matrix. Element `(i, j)` lives at `data[j * rows + i]`,
/// so `vec(A)` (column stacking) is the backing slice itself.
#[derive(Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CMat({}x{})", self.rows, self.cols)
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a column-major data vector.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols, "column-major length mismatch");
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn col(&self, j: usize) -> &[C64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn hermitian_transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for j in 0..self.cols {
            for i in 0..self.rows {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * x` for a length-`cols` vector.
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj == C64::new(0.0, 0.0) {
                continue;
            }
            let col = self.col(j);
            for (yi, &aij) in y.iter_mut().zip(col) {
                *yi += aij * xj;
            }
        }
        y
    }

    /// `self^H * x` for a length-`rows` vector.
    pub fn hermitian_matvec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.rows, "matvec dimension mismatch");
        let mut y = vec![C64::new(0.0, 0.0); self.cols];
        for (j, yj) in y.iter_mut().enumerate() {
            let col = self.col(j);
            let mut acc = C64::new(0.0, 0.0);
            for (&aij, &xi) in col.iter().zip(x) {
                acc += aij.conj() * xi;
            }
            *yj = acc;
        }
        y
    }
}

impl core::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[j * self.rows + i]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[j * self.rows + i]
    }
}

fn to_kernel(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// `C = A * B`.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.cols, b.rows, "matmul dimension mismatch");
    let mut c = CMat::zeros(a.rows, b.cols);
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            a.rows,
            a.cols,
            b.cols,
            to_kernel(C64::new(1.0, 0.0)),
            a.data.as_ptr() as *const [f64; 2],
            1,
            a.rows as isize,
            b.data.as_ptr() as *const [f64; 2],
            1,
            b.rows as isize,
            to_kernel(C64::new(0.0, 0.0)),
            c.data.as_mut_ptr() as *mut [f64; 2],
            1,
            c.rows as isize,
        );
    }
    c
}

/// `C = A^H * B`. The conjugate of `A` is materialized once (the kernel only
/// supports transposition via strides).
pub fn hermitian_matmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.rows, b.rows, "hermitian_matmul dimension mismatch");
    let ac = a.conj();
    let mut c = CMat::zeros(a.cols, b.cols);
    unsafe {
        zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            ac.cols,
            ac.rows,
            b.cols,
            to_kernel(C64::new(1.0, 0.0)),
            ac.data.as_ptr() as *const [f64; 2],
            ac.rows as isize, // row stride of A^T = column stride of A
            1,
            b.data.as_ptr() as *const [f64; 2],
            1,
            b.rows as isize,
            to_kernel(C64::new(0.0, 0.0)),
            c.data.as_mut_ptr() as *mut [f64; 2],
            1,
            c.rows as isize,
        );
    }
    c
}

/// `A^H A` (Hermitian Gram matrix).
pub fn gram(a: &CMat) -> CMat {
    hermitian_matmul(a, a)
}

/// Error from a linear solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveError {
    /// The matrix is not (numerically) positive definite.
    NotPositiveDefinite { pivot: usize },
    /// Dimensions do not line up.
    DimensionMismatch,
}

impl fmt::Display for SolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::NotPositiveDefinite { pivot } => {
                write!(f, "matrix not positive definite at pivot {pivot}")
            }
            SolveError::DimensionMismatch => write!(f, "dimension mismatch"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SolveError {}

/// In-place lower Cholesky factor of a Hermitian positive definite matrix.
///
/// Only the lower triangle of `a` is referenced and overwritten with `L`
/// (`A = L L^H`). Blocked right-looking variant; the trailing update runs on
/// the gemm kernel, which is where the cubic work lands.
pub fn cholesky_in_place(a: &mut CMat) -> Result<(), SolveError> {
    let n = a.rows;
    if a.cols != n {
        return Err(SolveError::DimensionMismatch);
    }
    const NB: usize = 64;
    let mut k = 0;
    while k < n {
        let nb = NB.min(n - k);
        // Factor the diagonal block (unblocked).
        for j in k..k + nb {
            let mut djj = a[(j, j)].re;
            for p in k..j {
                djj -= a[(j, p)].norm_sqr();
            }
            if !(djj > 0.0) || !djj.is_finite() {
                return Err(SolveError::NotPositiveDefinite { pivot: j });
            }
            let ljj = djj.sqrt();
            a[(j, j)] = C64::new(ljj, 0.0);
            for i in j + 1..k + nb {
                let mut s = a[(i, j)];
                for p in k..j {
                    s -= a[(i, p)] * a[(j, p)].conj();
                }
                a[(i, j)] = s / ljj;
            }
        }
        let rest = k + nb;
        if rest < n {
            // Panel solve: A[rest.., k..k+nb] <- A[rest.., k..k+nb] * L11^{-H}.
            for j in k..k + nb {
                let ljj = a[(j, j)].re;
                for p in k..j {
                    let lpj = a[(j, p)].conj();
                    for i in rest..n {
                        let t = a[(i, p)] * lpj;
                        a[(i, j)] -= t;
                    }
                }
                for i in rest..n {
                    a[(i, j)] /= ljj;
                }
            }
            // Trailing update: A22 -= L21 * L21^H (lower triangle only, done
            // block-column-wise through the gemm kernel).
            let panel_rows = n - rest;
            let mut panel = CMat::zeros(panel_rows, nb);
            for j in 0..nb {
                for i in 0..panel_rows {
                    panel[(i, j)] = a[(rest + i, k + j)];
                }
            }
            let panel_h = panel.conj();
            let mut jb = 0;
            while jb < panel_rows {
                let wb = NB.min(panel_rows - jb);
                // Update block column [rest+jb.., rest+jb..rest+jb+wb].
                let m_rows = panel_rows - jb;
                let mut upd = CMat::zeros(m_rows, wb);
                unsafe {
                    zgemm(
                        CGemmOption::Standard,
                        CGemmOption::Standard,
                        m_rows,
                        nb,
                        wb,
                        to_kernel(C64::new(1.0, 0.0)),
                        panel.data.as_ptr().add(jb) as *const [f64; 2],
                        1,
                        panel.rows as isize,
                        panel_h.data.as_ptr().add(jb) as *const [f64; 2],
                        panel_h.rows as isize,
                        1,
                        to_kernel(C64::new(0.0, 0.0)),
                        upd.data.as_mut_ptr() as *mut [f64; 2],
                        1,
                        upd.rows as isize,
                    );
                }
                for j in 0..wb {
                    let cj = rest + jb + j;
                    for i in j..m_rows {
                        let t = upd[(i, j)];
                        a[(rest + jb + i, cj)] -= t;
                    }
                }
                jb += wb;
            }
        }
        k += nb;
    }
    Ok(())
}

/// Solve `L y = b` then `L^H x = y` with `L` from [`cholesky_in_place`].
pub fn cholesky_solve(l: &CMat, b: &[C64]) -> Vec<C64> {
    let n = l.rows;
    assert_eq!(b.len(), n, "cholesky_solve dimension mismatch");
    let mut x = b.to_vec();
    // Forward substitution.
    for j in 0..n {
        let xj = x[j] / l[(j, j)].re;
        x[j] = xj;
        if xj != C64::new(0.0, 0.0) {
            let col = l.col(j);
            for i in j + 1..n {
                x[i] -= col[i] * xj;
            }
        }
    }
    // Backward substitution with L^H.
    for j in (0..n).rev() {
        let mut s = x[j];
        let col = l.col(j);
        for i in j + 1..n {
            s -= col[i].conj() * x[i];
        }
        x[j] = s / l[(j, j)].re;
    }
    x
}

/// Solve `(A + lambda I) x = b` for Hermitian positive semidefinite `A`
/// without destroying `A`.
pub fn regularized_hermitian_solve(
    a: &CMat,
    lambda: f64,
    b: &[C64],
) -> Result<Vec<C64>, SolveError> {
    let mut m = a.clone();
    for i in 0..m.rows() {
        m[(i, i)] += C64::new(lambda, 0.0);
    }
    cholesky_in_place(&mut m)?;
    Ok(cholesky_solve(&m, b))
}

/// Eigendecomposition of a symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Column `j` is the eigenvector of `values[j]`; columns orthonormal.
    pub vectors: Vec<Vec<f64>>,
}

/// Error from the tridiagonal eigensolver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenError {
    /// Index of the eigenvalue that failed to converge.
    pub index: usize,
}

impl fmt::Display for EigenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QL iteration failed to converge at eigenvalue {}",
            self.index
        )
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EigenError {}

/// Implicit-shift QL with eigenvector accumulation (EISPACK `tql2` scheme).
///
/// `diag` holds the `n` diagonal entries, `off` the `n-1` off-diagonal ones.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<TridiagEigen, EigenError> {
    let n = diag.len();
    assert!(n >= 1);
    assert_eq!(off.len(), n - 1, "off-diagonal length mismatch");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    // z starts as the identity and accumulates the rotations; stored
    // column-major as a flat Vec for cache-friendly column updates below.
    let mut z = vec![0.0f64; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a small off-diagonal element to split at.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(EigenError { index: l });
            }
            // Form the implicit shift.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                // Accumulate the rotation into columns i and i+1 of z.
                let (zi, zi1) = {
                    let ptr = z.as_mut_ptr();
                    unsafe {
                        (
                            core::slice::from_raw_parts_mut(ptr.add(i * n), n),
                            core::slice::from_raw_parts_mut(ptr.add((i + 1) * n), n),
                        )
                    }
                };
                for k in 0..n {
                    f = zi1[k];
                    zi1[k] = s * zi[k] + c * f;
                    zi[k] = c * zi[k] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending by eigenvalue, carrying the eigenvectors along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&i| z[i * n..(i + 1) * n].to_vec())
        .collect();
    Ok(TridiagEigen { values, vectors })
}
