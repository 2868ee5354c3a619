//! Frame operators, frame bounds, canonical duals, and Parseval transforms
//! for finite indexed vector systems.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{FrameError, Result};
use crate::geometry::{Point, PointGeometry};
use crate::linalg::{self, hermitian_eigen, CMatrix, HermitianEigen};
#[allow(unused_imports)]
use num_traits::Float;

/// Relative threshold below which eigenvalues count as zero for rank and
/// pseudo-inverse purposes.
pub const TOL_RANK: f64 = 1e-10;
/// Relative Hermitian-symmetrization tolerance.
pub const TOL_HERM: f64 = 1e-10;
/// Absolute tolerance for negative eigenvalues of a frame operator.
pub const TOL_PSD: f64 = 1e-10;
/// Absolute tolerance for the trace identity sum(d_lambda) = rank(S).
pub const TOL_TRACE: f64 = 1e-8;

/// An indexed family of complex vectors in a finite-dimensional ambient
/// space; each vector is tagged with a point of the index geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSystem {
    ambient_dim: usize,
    vectors: Vec<Vec<Complex64>>,
    index_points: Vec<Point>,
    geometry: PointGeometry,
    labels: Option<Vec<String>>,
}

impl FrameSystem {
    pub fn new(
        ambient_dim: usize,
        vectors: Vec<Vec<Complex64>>,
        index_points: Vec<Point>,
        geometry: PointGeometry,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(FrameError::InvalidInput("ambient dimension must be positive".into()));
        }
        if vectors.is_empty() {
            return Err(FrameError::InvalidInput("a frame system needs at least one vector".into()));
        }
        if vectors.len() != index_points.len() {
            return Err(FrameError::InvalidInput(format!(
                "{} vectors but {} index points",
                vectors.len(),
                index_points.len()
            )));
        }
        if let Some(lbls) = &labels {
            if lbls.len() != vectors.len() {
                return Err(FrameError::InvalidInput("label count mismatch".into()));
            }
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != ambient_dim {
                return Err(FrameError::InvalidInput(format!(
                    "vector {i} has length {} in ambient dimension {ambient_dim}",
                    v.len()
                )));
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(FrameError::InvalidInput(format!("vector {i} has non-finite entries")));
            }
        }
        for (i, p) in index_points.iter().enumerate() {
            if p.len() != geometry.dim() || !geometry.contains(p) {
                return Err(FrameError::InvalidInput(format!(
                    "index point {i} lies outside the geometry's domain"
                )));
            }
        }
        Ok(FrameSystem { ambient_dim, vectors, index_points, geometry, labels })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[Complex64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }

    pub fn index_points(&self) -> &[Point] {
        &self.index_points
    }

    pub fn geometry(&self) -> &PointGeometry {
        &self.geometry
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Per-vector squared-norm bounds `(c, C)`.
    pub fn norm_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for v in &self.vectors {
            let n = linalg::norm_sqr(v);
            lo = lo.min(n);
            hi = hi.max(n);
        }
        (lo, hi)
    }

    /// Restriction to a subset of indices, keeping geometry and tags.
    pub fn subset(&self, indices: &[usize]) -> Result<FrameSystem> {
        if indices.is_empty() {
            return Err(FrameError::InvalidInput("subset must be nonempty".into()));
        }
        let vectors = indices.iter().map(|&i| self.vectors[i].clone()).collect();
        let index_points = indices.iter().map(|&i| self.index_points[i].clone()).collect();
        let labels = self
            .labels
            .as_ref()
            .map(|ls| indices.iter().map(|&i| ls[i].clone()).collect());
        FrameSystem::new(self.ambient_dim, vectors, index_points, self.geometry.clone(), labels)
    }

    /// Same vectors re-derived from a map; used by dual/Parseval transforms.
    fn with_vectors(&self, vectors: Vec<Vec<Complex64>>) -> FrameSystem {
        FrameSystem {
            ambient_dim: self.ambient_dim,
            vectors,
            index_points: self.index_points.clone(),
            geometry: self.geometry.clone(),
            labels: self.labels.clone(),
        }
    }
}

/// A square matrix certified Hermitian after symmetrization.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    pub matrix: CMatrix,
    pub certified_hermitian: bool,
}

/// Certified lower/upper frame bounds on the span of the system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub rank: usize,
    pub on_span: bool,
}

/// `S = sum g g*`, symmetrized.
pub fn frame_operator(f: &FrameSystem) -> Result<HermitianOperator> {
    let mut s = CMatrix::zeros(f.ambient_dim(), f.ambient_dim());
    for v in f.vectors() {
        s.add_outer(v);
    }
    let asym = s.hermitize();
    if asym > TOL_HERM {
        return Err(FrameError::NumericalFailure(format!(
            "frame operator drifted from Hermitian by relative {asym:e}"
        )));
    }
    Ok(HermitianOperator { matrix: s, certified_hermitian: true })
}

fn frame_eigen(f: &FrameSystem) -> Result<HermitianEigen> {
    let s = frame_operator(f)?;
    let eig = hermitian_eigen(&s.matrix)?;
    let max_eig = eig.values.last().copied().unwrap_or(0.0);
    if eig.values.first().copied().unwrap_or(0.0) < -TOL_PSD * max_eig.max(1.0) {
        return Err(FrameError::NumericalFailure(format!(
            "frame operator has a negative eigenvalue {:e}",
            eig.values[0]
        )));
    }
    Ok(eig)
}

/// `(A, B)` = smallest nonzero and largest eigenvalue of S; bounds hold on
/// the span of the system, never on the ambient space.
pub fn frame_bounds(f: &FrameSystem) -> Result<FrameBounds> {
    let eig = frame_eigen(f)?;
    bounds_from_eigen(&eig)
}

fn bounds_from_eigen(eig: &HermitianEigen) -> Result<FrameBounds> {
    let upper = eig.values.last().copied().unwrap_or(0.0).max(0.0);
    let rank = eig.rank(TOL_RANK);
    let lower = if rank == 0 {
        0.0
    } else {
        let n = eig.values.len();
        eig.values[n - rank]
    };
    Ok(FrameBounds { lower, upper, rank, on_span: true })
}

fn require_frame(eig: &HermitianEigen) -> Result<()> {
    if eig.rank(TOL_RANK) == 0 {
        return Err(FrameError::InvalidInput(
            "system has no positive frame bound on any span (all vectors are zero)".into(),
        ));
    }
    Ok(())
}

/// Canonical dual `{S+ g}` via the pseudo-inverse on the range of S.
pub fn canonical_dual(f: &FrameSystem) -> Result<FrameSystem> {
    let eig = frame_eigen(f)?;
    require_frame(&eig)?;
    let pinv = eig.apply_spectral(TOL_RANK, |x| 1.0 / x);
    let vectors = f.vectors().iter().map(|v| pinv.mul_vec(v)).collect();
    Ok(f.with_vectors(vectors))
}

/// Parseval transform `{S^(-1/2) g}`; the result has frame bounds 1 on the
/// span of the original system.
pub fn parseval_transform(f: &FrameSystem) -> Result<FrameSystem> {
    let eig = frame_eigen(f)?;
    require_frame(&eig)?;
    let inv_sqrt = eig.apply_spectral(TOL_RANK, |x| 1.0 / x.sqrt());
    let vectors = f.vectors().iter().map(|v| inv_sqrt.mul_vec(v)).collect();
    Ok(f.with_vectors(vectors))
}

/// Diagonal coefficients `d = <g, S+ g>`, the squared norms of the Parseval
/// transform; each lies in [0, 1] and they sum to rank(S).
pub fn diagonal_coefficients(f: &FrameSystem) -> Result<Vec<f64>> {
    let eig = frame_eigen(f)?;
    require_frame(&eig)?;
    let pinv = eig.apply_spectral(TOL_RANK, |x| 1.0 / x);
    let coeffs: Vec<f64> = f
        .vectors()
        .iter()
        .map(|v| linalg::inner_product(v, &pinv.mul_vec(v)).re)
        .collect();
    let sum: f64 = coeffs.iter().sum();
    let rank = eig.rank(TOL_RANK) as f64;
    if (sum - rank).abs() > TOL_TRACE * rank.max(1.0) {
        return Err(FrameError::NumericalFailure(format!(
            "trace identity violated: sum of diagonal coefficients {sum} vs rank {rank}"
        )));
    }
    Ok(coeffs)
}

/// Largest eigenvalue of S; no lower-bound requirement.
pub fn bessel_bound(f: &FrameSystem) -> Result<f64> {
    let s = frame_operator(f)?;
    let eig = hermitian_eigen(&s.matrix)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0))
}
