//! Dense complex matrices and a Jacobi eigensolver for Hermitian matrices.
//!
//! Everything here is sized for desk-scale problems (dimensions up to a few
//! hundred); there are no sparse or blocked code paths.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{FrameError, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix { n_rows, n_cols, data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n_rows = rows.len();
        let n_cols = if n_rows > 0 { rows[0].len() } else { 0 };
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            debug_assert_eq!(r.len(), n_cols);
            data.extend_from_slice(r);
        }
        CMatrix { n_rows, n_cols, data }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n_rows).map(|i| self[(i, j)]).collect()
    }

    /// Rank-one update `self += v v*`.
    pub fn add_outer(&mut self, v: &[Complex64]) {
        debug_assert_eq!(v.len(), self.n_rows);
        debug_assert_eq!(v.len(), self.n_cols);
        for i in 0..self.n_rows {
            let vi = v[i];
            for j in 0..self.n_cols {
                self[(i, j)] += vi * v[j].conj();
            }
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.n_cols);
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_rows];
        for i in 0..self.n_rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n_cols {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        debug_assert_eq!(self.n_cols, other.n_rows);
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let aik = self[(i, k)];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Replace by the Hermitian part `(A + A*)/2` and report the relative
    /// asymmetry that was removed.
    pub fn hermitize(&mut self) -> f64 {
        debug_assert_eq!(self.n_rows, self.n_cols);
        let mut asym: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for i in 0..self.n_rows {
            for j in i..self.n_cols {
                let a = self[(i, j)];
                let b = self[(j, i)].conj();
                let avg = (a + b) * 0.5;
                asym = asym.max((a - avg).norm());
                scale = scale.max(avg.norm());
                self[(i, j)] = avg;
                self[(j, i)] = avg.conj();
            }
        }
        if scale > 0.0 {
            asym / scale
        } else {
            0.0
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl core::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in ascending
/// order and a unitary matrix whose columns are the matching eigenvectors.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

const MAX_SWEEPS: usize = 64;

/// Cyclic Jacobi iteration with complex rotations. The input is hermitized
/// first, so mild floating-point asymmetry is tolerated.
pub fn hermitian_eigen(matrix: &CMatrix) -> Result<HermitianEigen> {
    if matrix.n_rows() != matrix.n_cols() {
        return Err(FrameError::InvalidInput(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            matrix.n_rows(),
            matrix.n_cols()
        )));
    }
    if !matrix.is_finite() {
        return Err(FrameError::InvalidInput("matrix has non-finite entries".into()));
    }
    let n = matrix.n_rows();
    let mut a = matrix.clone();
    a.hermitize();
    let mut vecs = CMatrix::identity(n);

    if n <= 1 {
        let values = (0..n).map(|i| a[(i, i)].re).collect();
        return Ok(HermitianEigen { values, vectors: vecs });
    }

    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let tol = scale * 1e-15;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b <= tol / (n as f64) {
                    continue;
                }
                let phase = apq / b;
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = phase * s; // s * e^{i phi}
                let spc = sp.conj();

                // Right-multiply A by the rotation (update columns p, q).
                for i in 0..n {
                    let aip = a[(i, p)];
                    let aiq = a[(i, q)];
                    a[(i, p)] = aip * c - aiq * spc;
                    a[(i, q)] = aip * sp + aiq * c;
                }
                // Left-multiply A by the conjugate transpose (update rows p, q).
                for j in 0..n {
                    let apj = a[(p, j)];
                    let aqj = a[(q, j)];
                    a[(p, j)] = apj * c - aqj * sp;
                    a[(q, j)] = apj * spc + aqj * c;
                }
                // Accumulate eigenvectors.
                for i in 0..n {
                    let vip = vecs[(i, p)];
                    let viq = vecs[(i, q)];
                    vecs[(i, p)] = vip * c - viq * spc;
                    vecs[(i, q)] = vip * sp + viq * c;
                }
                a[(p, q)] = Complex64::new(0.0, 0.0);
                a[(q, p)] = Complex64::new(0.0, 0.0);
            }
        }
    }
    if !converged {
        // One last check: the final sweep may have converged.
        let mut off: f64 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += 2.0 * a[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() > tol * 1e3 {
            return Err(FrameError::NumericalFailure(format!(
                "Jacobi eigensolver did not converge in {MAX_SWEEPS} sweeps (off-diagonal {off:e})"
            )));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut sorted = CMatrix::zeros(n, n);
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..n {
            sorted[(i, new_j)] = vecs[(i, old_j)];
        }
    }
    Ok(HermitianEigen { values, vectors: sorted })
}

impl HermitianEigen {
    /// Numerical-rank threshold: eigenvalues below `max_eig * rel_tol` count
    /// as zero.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let max_eig = self.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        if max_eig == 0.0 {
            return 0;
        }
        let thr = max_eig * rel_tol;
        self.values.iter().filter(|&&v| v > thr).count()
    }

    /// Assemble `V f(lambda) V*`, applying `f` only to eigenvalues above the
    /// rank threshold and mapping the rest to zero.
    pub fn apply_spectral<F: Fn(f64) -> f64>(&self, rel_tol: f64, f: F) -> CMatrix {
        let n = self.values.len();
        let max_eig = self.values.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
        let thr = max_eig * rel_tol;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            if lam <= thr {
                continue;
            }
            let flam = f(lam);
            let col = self.vectors.column(k);
            for i in 0..n {
                let vi = col[i] * flam;
                for j in 0..n {
                    out[(i, j)] += vi * col[j].conj();
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eigen_diagonal() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(3.0, 0.0);
        m[(1, 1)] = c(1.0, 0.0);
        m[(2, 2)] = c(2.0, 0.0);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
        assert!((e.values[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_complex_hermitian_2x2() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3.
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(2.0, 0.0);
        m[(0, 1)] = c(0.0, 1.0);
        m[(1, 0)] = c(0.0, -1.0);
        m[(1, 1)] = c(2.0, 0.0);
        let e = hermitian_eigen(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstructs_matrix() {
        // Pseudo-random Hermitian matrix, checked by V diag(L) V* = A.
        let n = 12;
        let mut m = CMatrix::zeros(n, n);
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c(next(), next());
            }
        }
        m.hermitize();
        let e = hermitian_eigen(&m).unwrap();
        let recon = e.apply_spectral(0.0, |x| x);
        // apply_spectral drops nonpositive eigenvalues, so reconstruct by hand.
        let mut full = CMatrix::zeros(n, n);
        for k in 0..n {
            let col = e.vectors.column(k);
            for i in 0..n {
                for j in 0..n {
                    full[(i, j)] += col[i] * col[j].conj() * e.values[k];
                }
            }
        }
        let _ = recon;
        for i in 0..n {
            for j in 0..n {
                assert!((full[(i, j)] - m[(i, j)]).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let n = 8;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = c((i * j % 5) as f64, (i as f64 - j as f64) * 0.3);
            }
        }
        m.hermitize();
        let e = hermitian_eigen(&m).unwrap();
        for p in 0..n {
            for q in 0..n {
                let ip = inner_product(&e.vectors.column(p), &e.vectors.column(q));
                let expect = if p == q { 1.0 } else { 0.0 };
                assert!((ip - c(expect, 0.0)).norm() < 1e-10, "columns {p},{q}");
            }
        }
    }

    #[test]
    fn rank_threshold() {
        let mut m = CMatrix::zeros(3, 3);
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 1)] = c(1e-14, 0.0);
        let e = hermitian_eigen(&m).unwrap();
        assert_eq!(e.rank(1e-10), 1);
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(hermitian_eigen(&m), Err(FrameError::InvalidInput(_))));
    }
}
