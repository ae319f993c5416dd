//! Dense complex matrices and vectors for small Hilbert spaces.
//!
//! Everything here is sized for dimensions in the single to low double
//! digits, so the implementations favor clarity and exactness over
//! asymptotic performance. Comparisons are tolerance-based throughout;
//! see [`TOL_ALGEBRAIC`] and [`TOL_PSD`].

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default absolute tolerance for algebraic identities (entrywise).
pub const TOL_ALGEBRAIC: f64 = 1e-12;

/// Default absolute tolerance for eigenvalue-based positivity checks.
pub const TOL_PSD: f64 = 1e-10;

/// Dense complex vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    data: Vec<Complex64>,
}

impl ComplexVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn from_real(reals: &[f64]) -> Self {
        Self {
            data: reals.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        }
    }

    /// Computational basis vector |index⟩ in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.data[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: Complex64) {
        self.data[i] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        Self {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// Inner product ⟨self|other⟩ (conjugate-linear in `self`).
    pub fn inner(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product |self⟩⟨other|.
    pub fn outer(&self, other: &Self) -> ComplexMatrix {
        let rows = self.dim();
        let cols = other.dim();
        let mut m = ComplexMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, self.data[i] * other.data[j].conj());
            }
        }
        m
    }

    /// Kronecker product |self⟩ ⊗ |other⟩.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F>(rows: usize, cols: usize, mut f: F) -> Self
    where
        F: FnMut(usize, usize) -> Complex64,
    {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from real entries, row by row.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        Self::from_fn(r, c, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.cols + j] = value;
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &ComplexVector) -> ComplexVector {
        assert_eq!(self.cols, v.dim(), "matrix-vector dimension mismatch");
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.cols {
                acc += self.get(i, j) * v.get(j);
            }
            out.set(i, acc);
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product, first factor most significant.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise absolute value.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self.get(i, j) - self.get(j, i).conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi sweeps.
    ///
    /// The off-diagonal phase is absorbed into each rotation so the method
    /// works for complex Hermitian input directly.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_square() {
            return Err(Error::Consistency(
                "eigenvalues requested for a non-square matrix".into(),
            ));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut a = self.clone();
        // Symmetrize defensively so tiny Hermiticity violations cannot bias sweeps.
        for i in 0..n {
            for j in 0..n {
                let sym = (a.get(i, j) + a.get(j, i).conj()) * Complex64::new(0.5, 0.0);
                a.set(i, j, sym);
            }
        }
        let scale = a.max_abs().max(1.0);
        let threshold = 1e-15 * scale;
        for _sweep in 0..100 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a.get(p, q).norm());
                }
            }
            if off <= threshold {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    let abs = apq.norm();
                    if abs <= threshold * 1e-2 {
                        continue;
                    }
                    let phase = apq / abs;
                    let app = a.get(p, p).re;
                    let aqq = a.get(q, q).re;
                    let tau = (aqq - app) / (2.0 * abs);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    // G = I except in the (p,q) plane; A <- G† A G.
                    let gpp = Complex64::new(c, 0.0);
                    let gpq = Complex64::new(s, 0.0);
                    let gqp = -phase.conj() * s;
                    let gqq = phase.conj() * c;
                    for i in 0..n {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        a.set(i, p, aip * gpp + aiq * gqp);
                        a.set(i, q, aip * gpq + aiq * gqq);
                    }
                    for j in 0..n {
                        let apj = a.get(p, j);
                        let aqj = a.get(q, j);
                        a.set(p, j, gpp.conj() * apj + gqp.conj() * aqj);
                        a.set(q, j, gpq.conj() * apj + gqq.conj() * aqj);
                    }
                    a.set(p, q, Complex64::new(0.0, 0.0));
                    a.set(q, p, Complex64::new(0.0, 0.0));
                }
            }
        }
        let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        Ok(eigs)
    }

    /// True iff the matrix is Hermitian within `tol` and all eigenvalues ≥ −`tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        if !self.is_square() || !self.is_hermitian(tol) {
            return false;
        }
        match self.hermitian_eigenvalues() {
            Ok(eigs) => eigs.iter().all(|&e| e >= -tol),
            Err(_) => false,
        }
    }

    /// Smallest eigenvalue of a Hermitian matrix.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let eigs = self.hermitian_eigenvalues()?;
        eigs.first().copied().ok_or_else(|| {
            Error::Consistency("min eigenvalue of an empty matrix".into())
        })
    }

    /// Number of eigenvalues with magnitude above `tol` (Hermitian input).
    pub fn hermitian_rank(&self, tol: f64) -> Result<usize> {
        let eigs = self.hermitian_eigenvalues()?;
        Ok(eigs.iter().filter(|e| e.abs() > tol).count())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_tensor_identity() {
        let i2 = ComplexMatrix::identity(2);
        let i4 = i2.kron(&i2);
        assert!(i4.approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn basis_projector_tensor() {
        let p1 = ComplexVector::basis(2, 0);
        let p2 = ComplexVector::basis(2, 1);
        let proj = p1.outer(&p1).kron(&p2.outer(&p2));
        // rank-1 projector onto |0⟩⊗|1⟩ = index 1 of the 4-dim space
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == 1 && j == 1 { 1.0 } else { 0.0 };
                assert!((proj.get(i, j) - c(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn tensor_is_associative() {
        let a = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64, 0.3 * i as f64));
        let b = ComplexMatrix::from_fn(2, 2, |i, j| c(1.0 - j as f64, i as f64));
        let d = ComplexMatrix::from_fn(2, 2, |i, j| c(0.5 * i as f64, (j + 1) as f64));
        let left = a.kron(&b).kron(&d);
        let right = a.kron(&b.kron(&d));
        assert!(left.approx_eq(&right, TOL_ALGEBRAIC));
    }

    #[test]
    fn jacobi_matches_known_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let m = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => c(2.0, 0.0),
            (0, 1) => c(0.0, 1.0),
            _ => c(0.0, -1.0),
        });
        let eigs = m.hermitian_eigenvalues().unwrap();
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!((eigs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_preserves_trace_and_frobenius() {
        // deterministic pseudo-random Hermitian matrix
        let n = 7;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c(next(), 0.0));
            for j in (i + 1)..n {
                let v = c(next(), next());
                m.set(i, j, v);
                m.set(j, i, v.conj());
            }
        }
        let eigs = m.hermitian_eigenvalues().unwrap();
        let trace: f64 = eigs.iter().sum();
        assert!((trace - m.trace().re).abs() < 1e-10);
        let fro_sq: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).norm_sqr())
            .sum();
        let eig_sq: f64 = eigs.iter().map(|e| e * e).sum();
        assert!((fro_sq - eig_sq).abs() < 1e-9);
    }

    #[test]
    fn psd_detects_sign() {
        assert!(ComplexMatrix::identity(2).is_psd(TOL_PSD));
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -0.1]]);
        assert!(!m.is_psd(TOL_PSD));
    }

    #[test]
    fn adjoint_of_product() {
        let a = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        let b = ComplexMatrix::from_fn(3, 2, |i, j| c(j as f64 - 1.0, i as f64));
        let lhs = a.matmul(&b).adjoint();
        let rhs = b.adjoint().matmul(&a.adjoint());
        assert!(lhs.approx_eq(&rhs, 1e-14));
    }
}
