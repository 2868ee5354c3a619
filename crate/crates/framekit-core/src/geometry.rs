//! Index geometries, window families, and Beurling-density estimators.
//!
//! Densities are defined through limits over growing balls; at finite scale
//! this module reports a radius sweep with headline values taken at the
//! largest radius, together with a stabilization diagnostic. The sup/inf over
//! all centers is replaced by a configurable center grid.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{FrameError, Result};
#[allow(unused_imports)]
use num_traits::Float;

pub type Point = Vec<f64>;

/// Shape of the index space.
#[derive(Debug, Clone, PartialEq)]
pub enum GeometryKind {
    /// Axis-aligned box `[origin_i, origin_i + side_i]` with the Euclidean
    /// metric; `periodic` wraps every axis.
    EuclideanBox { origin: Vec<f64>, side_lengths: Vec<f64>, periodic: bool },
    /// The group Z_N x Z_N with the wrap-around sup metric.
    CyclicTorus { modulus: usize },
}

/// Diagonal of the reproducing kernel, `k(y, y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelDiagonal {
    Constant(f64),
    /// Per group element of a cyclic torus, indexed by `a * N + b`.
    PerElement(Vec<f64>),
}

/// A finite metric space with a measure weight per unit window volume
/// (Euclidean) or per group element (cyclic), and an optional kernel
/// diagonal used by the weighted densities.
#[derive(Debug, Clone, PartialEq)]
pub struct PointGeometry {
    pub kind: GeometryKind,
    /// Measure weight per unit volume (box) or per group element (torus).
    pub point_measure: f64,
    pub kernel_diagonal: Option<KernelDiagonal>,
}

impl PointGeometry {
    pub fn euclidean_box(origin: Vec<f64>, side_lengths: Vec<f64>, periodic: bool) -> Result<Self> {
        if side_lengths.is_empty() || origin.len() != side_lengths.len() {
            return Err(FrameError::InvalidInput("box origin/side dimension mismatch".into()));
        }
        if side_lengths.iter().any(|&s| !(s > 0.0)) {
            return Err(FrameError::InvalidInput("box side lengths must be positive".into()));
        }
        Ok(PointGeometry {
            kind: GeometryKind::EuclideanBox { origin, side_lengths, periodic },
            point_measure: 1.0,
            kernel_diagonal: None,
        })
    }

    /// Line segment `[origin, origin + length]`, the index geometry of
    /// exponential systems.
    pub fn line(origin: f64, length: f64) -> Result<Self> {
        Self::euclidean_box(alloc::vec![origin], alloc::vec![length], false)
    }

    /// `Z_N x Z_N` with weight `1/N` per group element, so the full group has
    /// density `N` and the critical density 1 corresponds to about `N` points.
    pub fn cyclic_torus(modulus: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(FrameError::InvalidInput("torus modulus must be >= 2".into()));
        }
        Ok(PointGeometry {
            kind: GeometryKind::CyclicTorus { modulus },
            point_measure: 1.0 / modulus as f64,
            kernel_diagonal: None,
        })
    }

    pub fn with_point_measure(mut self, mu0: f64) -> Self {
        self.point_measure = mu0;
        self
    }

    pub fn with_kernel_diagonal(mut self, k: KernelDiagonal) -> Self {
        self.kernel_diagonal = Some(k);
        self
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            GeometryKind::EuclideanBox { side_lengths, .. } => side_lengths.len(),
            GeometryKind::CyclicTorus { .. } => 2,
        }
    }

    /// Largest distance realizable between two points of the domain.
    pub fn diameter(&self) -> f64 {
        match &self.kind {
            GeometryKind::EuclideanBox { side_lengths, periodic, .. } => {
                let sq: f64 = side_lengths
                    .iter()
                    .map(|&s| {
                        let span = if *periodic { s / 2.0 } else { s };
                        span * span
                    })
                    .sum();
                sq.sqrt()
            }
            GeometryKind::CyclicTorus { modulus } => *modulus as f64 / 2.0,
        }
    }

    /// Kernel-diagonal bounds `C1 <= k(y, y) <= C2`; `(1, 1)` when absent.
    pub fn kernel_bounds(&self) -> (f64, f64) {
        match &self.kernel_diagonal {
            None => (1.0, 1.0),
            Some(KernelDiagonal::Constant(c)) => (*c, *c),
            Some(KernelDiagonal::PerElement(ks)) => {
                let lo = ks.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ks.iter().cloned().fold(0.0_f64, f64::max);
                (lo, hi)
            }
        }
    }

    pub fn validate_kernel(&self) -> Result<()> {
        let (lo, hi) = self.kernel_bounds();
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(FrameError::InvalidInput(format!(
                "kernel diagonal must satisfy 0 < C1 <= C2 < inf, got [{lo}, {hi}]"
            )));
        }
        if let (Some(KernelDiagonal::PerElement(ks)), GeometryKind::CyclicTorus { modulus }) =
            (&self.kernel_diagonal, &self.kind)
        {
            if ks.len() != modulus * modulus {
                return Err(FrameError::InvalidInput(
                    "per-element kernel diagonal must have N^2 entries".into(),
                ));
            }
        }
        if matches!(self.kernel_diagonal, Some(KernelDiagonal::PerElement(_)))
            && !matches!(self.kind, GeometryKind::CyclicTorus { .. })
        {
            return Err(FrameError::InvalidInput(
                "per-element kernel diagonals are only supported on the cyclic torus".into(),
            ));
        }
        Ok(())
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match &self.kind {
            GeometryKind::EuclideanBox { side_lengths, periodic, .. } => {
                let mut sq = 0.0;
                for i in 0..side_lengths.len() {
                    let mut d = (a[i] - b[i]).abs();
                    if *periodic {
                        d = d % side_lengths[i];
                        d = d.min(side_lengths[i] - d);
                    }
                    sq += d * d;
                }
                sq.sqrt()
            }
            GeometryKind::CyclicTorus { modulus } => {
                let n = *modulus as f64;
                let mut sup = 0.0_f64;
                for i in 0..2 {
                    let mut d = (a[i] - b[i]).abs() % n;
                    d = d.min(n - d);
                    sup = sup.max(d);
                }
                sup
            }
        }
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        match &self.kind {
            GeometryKind::EuclideanBox { origin, side_lengths, periodic } => {
                if p.len() != side_lengths.len() {
                    return false;
                }
                if *periodic {
                    return true; // coordinates wrap
                }
                let tol = 1e-9;
                p.iter()
                    .zip(origin.iter().zip(side_lengths))
                    .all(|(&x, (&o, &s))| x >= o - tol && x <= o + s + tol)
            }
            GeometryKind::CyclicTorus { .. } => p.len() == 2,
        }
    }

    /// Measure of the ball `B_r(x)` intersected with the domain.
    ///
    /// Boxes are clipped exactly in dimension one; in higher dimensions the
    /// unclipped Euclidean ball volume (capped at the total volume) is used,
    /// so window centers should stay in the interior there.
    pub fn ball_measure(&self, center: &[f64], r: f64) -> f64 {
        match &self.kind {
            GeometryKind::EuclideanBox { origin, side_lengths, periodic } => {
                let vol = if side_lengths.len() == 1 {
                    let s = side_lengths[0];
                    if *periodic {
                        (2.0 * r).min(s)
                    } else {
                        let lo = (center[0] - r).max(origin[0]);
                        let hi = (center[0] + r).min(origin[0] + s);
                        (hi - lo).max(0.0)
                    }
                } else {
                    let d = side_lengths.len();
                    let total: f64 = side_lengths.iter().product();
                    unit_ball_volume(d).map_or(total, |u| (u * r.powi(d as i32)).min(total))
                };
                vol * self.point_measure
            }
            GeometryKind::CyclicTorus { .. } => {
                let count = self.torus_axis_count(center[0], r) * self.torus_axis_count(center[1], r);
                count as f64 * self.point_measure
            }
        }
    }

    /// Kernel-weighted ball measure, the denominator of the dimension-free
    /// densities.
    pub fn weighted_ball_measure(&self, center: &[f64], r: f64) -> f64 {
        match &self.kernel_diagonal {
            None => self.ball_measure(center, r),
            Some(KernelDiagonal::Constant(c)) => c * self.ball_measure(center, r),
            Some(KernelDiagonal::PerElement(ks)) => {
                if let GeometryKind::CyclicTorus { modulus } = &self.kind {
                    let n = *modulus;
                    let mut sum = 0.0;
                    for a in 0..n {
                        for b in 0..n {
                            let y = [a as f64, b as f64];
                            if self.distance(&y, center) < r {
                                sum += ks[a * n + b];
                            }
                        }
                    }
                    sum * self.point_measure
                } else {
                    self.ball_measure(center, r)
                }
            }
        }
    }

    fn torus_axis_count(&self, center: f64, r: f64) -> usize {
        let n = match &self.kind {
            GeometryKind::CyclicTorus { modulus } => *modulus,
            _ => unreachable!(),
        };
        let nf = n as f64;
        (0..n)
            .filter(|&t| {
                let mut d = (t as f64 - center).abs() % nf;
                d = d.min(nf - d);
                d < r
            })
            .count()
    }
}

fn unit_ball_volume(d: usize) -> Option<f64> {
    // vol(B_1) in dimensions 1..=4; enough for the supported geometries.
    match d {
        1 => Some(2.0),
        2 => Some(core::f64::consts::PI),
        3 => Some(4.0 / 3.0 * core::f64::consts::PI),
        4 => Some(core::f64::consts::PI * core::f64::consts::PI / 2.0),
        _ => None,
    }
}

/// Centers and an increasing radius list over which densities are evaluated.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowFamily {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
}

impl WindowFamily {
    pub fn new(centers: Vec<Point>, radii: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || radii.is_empty() {
            return Err(FrameError::InvalidInput("window family needs centers and radii".into()));
        }
        if radii.iter().any(|&r| !(r > 0.0)) {
            return Err(FrameError::InvalidInput("window radii must be positive".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FrameError::InvalidInput("window radii must be strictly increasing".into()));
        }
        Ok(WindowFamily { centers, radii })
    }

    /// Default center grid covering the domain with spacing `r_max / 2`.
    pub fn grid(geometry: &PointGeometry, radii: Vec<f64>) -> Result<Self> {
        let r_max = radii.last().copied().unwrap_or(0.0);
        if !(r_max > 0.0) {
            return Err(FrameError::InvalidInput("window radii must be positive".into()));
        }
        let spacing = r_max / 2.0;
        let centers = match &geometry.kind {
            GeometryKind::EuclideanBox { origin, side_lengths, .. } => {
                let mut axes: Vec<Vec<f64>> = Vec::new();
                for (o, s) in origin.iter().zip(side_lengths) {
                    let mut axis = Vec::new();
                    let mut x = *o;
                    while x < o + s - 1e-12 {
                        axis.push(x);
                        x += spacing;
                    }
                    if axis.is_empty() {
                        axis.push(*o);
                    }
                    axes.push(axis);
                }
                cartesian(&axes)
            }
            GeometryKind::CyclicTorus { modulus } => {
                let step = (spacing.round() as usize).clamp(1, *modulus);
                let mut axis = Vec::new();
                let mut t = 0usize;
                while t < *modulus {
                    axis.push(t as f64);
                    t += step;
                }
                cartesian(&[axis.clone(), axis])
            }
        };
        Self::new(centers, radii)
    }

    pub fn headline_radius(&self) -> f64 {
        *self.radii.last().unwrap()
    }
}

fn cartesian(axes: &[Vec<f64>]) -> Vec<Point> {
    let mut out: Vec<Point> = alloc::vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in axis {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All points of `points` strictly within distance `r` of `x`.
pub fn ball_points<'a>(
    points: &'a [Point],
    x: &[f64],
    r: f64,
    geometry: &PointGeometry,
) -> Vec<&'a Point> {
    points.iter().filter(|p| geometry.distance(p, x) < r).collect()
}

/// Indices of `points` strictly within distance `r` of `x`.
pub fn ball_indices(points: &[Point], x: &[f64], r: f64, geometry: &PointGeometry) -> Vec<usize> {
    (0..points.len()).filter(|&i| geometry.distance(&points[i], x) < r).collect()
}

/// One evaluated window.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowEntry {
    pub center_index: usize,
    pub radius: f64,
    pub count: usize,
    pub measure: f64,
    pub ratio: f64,
    pub weighted_measure: f64,
    pub weighted_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSummary {
    pub radius: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub min_weighted_ratio: f64,
    pub max_weighted_ratio: f64,
}

/// Finite-radius estimates of the Beurling densities D-+/- and their
/// kernel-weighted variants, with headline values taken at the largest
/// radius of the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub entries: Vec<WindowEntry>,
    pub per_radius: Vec<RadiusSummary>,
    pub headline_radius: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub d0_minus: f64,
    pub d0_plus: f64,
    /// Max relative change of the four headline values over the last two
    /// radii; small values suggest the sweep has stabilized.
    pub stabilization: f64,
}

/// Windowed density estimator: per window, count over measure, and count
/// over kernel-weighted measure.
pub fn beurling_density(
    points: &[Point],
    geometry: &PointGeometry,
    windows: &WindowFamily,
) -> Result<DensityReport> {
    geometry.validate_kernel()?;
    for c in &windows.centers {
        if !geometry.contains(c) {
            return Err(FrameError::InvalidInput("window center outside the domain".into()));
        }
    }
    let mut entries = Vec::with_capacity(windows.centers.len() * windows.radii.len());
    let mut per_radius = Vec::with_capacity(windows.radii.len());
    // Deterministic center-major, radius-minor assembly; summaries by radius.
    for (ci, center) in windows.centers.iter().enumerate() {
        for &r in &windows.radii {
            let measure = geometry.ball_measure(center, r);
            if !(measure > 0.0) {
                return Err(FrameError::InvalidInput(format!(
                    "window at center {ci} radius {r} has zero measure"
                )));
            }
            let weighted = geometry.weighted_ball_measure(center, r);
            let count = ball_indices(points, center, r, geometry).len();
            entries.push(WindowEntry {
                center_index: ci,
                radius: r,
                count,
                measure,
                ratio: count as f64 / measure,
                weighted_measure: weighted,
                weighted_ratio: count as f64 / weighted,
            });
        }
    }
    for &r in &windows.radii {
        let at_r: Vec<&WindowEntry> = entries.iter().filter(|e| e.radius == r).collect();
        let min_ratio = at_r.iter().map(|e| e.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = at_r.iter().map(|e| e.ratio).fold(0.0_f64, f64::max);
        let min_w = at_r.iter().map(|e| e.weighted_ratio).fold(f64::INFINITY, f64::min);
        let max_w = at_r.iter().map(|e| e.weighted_ratio).fold(0.0_f64, f64::max);
        per_radius.push(RadiusSummary {
            radius: r,
            min_ratio,
            max_ratio,
            min_weighted_ratio: min_w,
            max_weighted_ratio: max_w,
        });
    }
    let last = per_radius.last().unwrap().clone();
    let stabilization = if per_radius.len() >= 2 {
        let prev = &per_radius[per_radius.len() - 2];
        let rel = |a: f64, b: f64| {
            let scale = a.abs().max(b.abs()).max(1e-300);
            (a - b).abs() / scale
        };
        rel(last.min_ratio, prev.min_ratio)
            .max(rel(last.max_ratio, prev.max_ratio))
            .max(rel(last.min_weighted_ratio, prev.min_weighted_ratio))
            .max(rel(last.max_weighted_ratio, prev.max_weighted_ratio))
    } else {
        f64::INFINITY
    };
    Ok(DensityReport {
        entries,
        per_radius,
        headline_radius: last.radius,
        d_minus: last.min_ratio,
        d_plus: last.max_ratio,
        d0_minus: last.min_weighted_ratio,
        d0_plus: last.max_weighted_ratio,
        stabilization,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationReport {
    pub radius: f64,
    pub max_count_per_ball: usize,
    pub max_ratio: f64,
    pub is_separated_estimate: bool,
}

/// Worst-case points-per-ball over a center grid augmented with the points
/// themselves (so clusters are never missed at small radii).
pub fn relative_separation(
    points: &[Point],
    geometry: &PointGeometry,
    r: f64,
) -> Result<SeparationReport> {
    if !(r > 0.0) {
        return Err(FrameError::InvalidInput("separation radius must be positive".into()));
    }
    let grid = WindowFamily::grid(geometry, alloc::vec![r])?;
    let mut max_count = 0usize;
    let mut max_ratio = 0.0_f64;
    for center in grid.centers.iter().chain(points.iter()) {
        let count = ball_indices(points, center, r, geometry).len();
        let measure = geometry.ball_measure(center, r);
        max_count = max_count.max(count);
        if measure > 0.0 {
            max_ratio = max_ratio.max(count as f64 / measure);
        }
    }
    Ok(SeparationReport {
        radius: r,
        max_count_per_ball: max_count,
        max_ratio,
        is_separated_estimate: max_ratio.is_finite(),
    })
}
