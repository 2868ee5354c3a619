//! Iterative density reduction: the alpha-sublevel set, one-pass selector
//! removal with certified frame bounds, and the loop driving the density
//! estimate down toward 1 + epsilon.
//!
//! The theory fixes the cell size r through the bound
//! `(1/sqrt(r) + sqrt(alpha))^2 < 1/(1 + eps/4)`, which is valid in the
//! asymptotic regime only; finite systems rarely hold that many points per
//! ball. The effective r is therefore capped at the sublevel-set size (and
//! can be overridden), while certification always uses the Bessel bound the
//! selector actually achieved, which is sharper than the worst case.

use alloc::vec::Vec;

use crate::error::{FrameError, Result};
use crate::frame::{diagonal_coefficients, frame_bounds, parseval_transform, FrameBounds, FrameSystem};
use crate::geometry::{beurling_density, Point, PointGeometry, WindowFamily};
use crate::measure::frame_measure_with_coeffs;
use crate::selector::{find_selector, CellPartition, SelectorOptions, SelectorResult, Strategy};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, PartialEq)]
pub struct ThinningConfig {
    pub epsilon: f64,
    /// Cell size; defaults to the theory's r capped at the sublevel-set size.
    pub r_override: Option<usize>,
    /// Packing radius; defaults to the smallest feasible radius on a scan grid.
    pub big_r_override: Option<f64>,
    pub selector_strategy: Strategy,
    pub selector_budget: u128,
    pub selector_restarts: u32,
    pub max_iterations: usize,
    /// Abort when the certified lower bound falls below this.
    pub min_lower_bound: f64,
    /// Headline radius for all density and measure estimates.
    pub density_radius: f64,
    pub seed: u64,
}

impl ThinningConfig {
    pub fn new(epsilon: f64, density_radius: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(FrameError::InvalidInput("epsilon must lie in (0, 1]".into()));
        }
        if !(density_radius > 0.0) {
            return Err(FrameError::InvalidInput("density radius must be positive".into()));
        }
        Ok(ThinningConfig {
            epsilon,
            r_override: None,
            big_r_override: None,
            selector_strategy: Strategy::Greedy,
            selector_budget: 1_000_000,
            selector_restarts: 64,
            max_iterations: 1000,
            min_lower_bound: 1e-12,
            density_radius,
            seed: 0,
        })
    }

    fn windows(&self, geometry: &PointGeometry) -> Result<WindowFamily> {
        WindowFamily::grid(geometry, alloc::vec![self.density_radius / 2.0, self.density_radius])
    }
}

/// `alpha = 1/(1 + eps/2)` and the smallest natural r with
/// `(1/sqrt(r) + sqrt(alpha))^2 < 1/(1 + eps/4)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaR {
    pub alpha: f64,
    pub r: usize,
}

pub fn choose_alpha_r(epsilon: f64) -> Result<AlphaR> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(FrameError::InvalidInput("epsilon must lie in (0, 1]".into()));
    }
    let alpha = 1.0 / (1.0 + epsilon / 2.0);
    let target = 1.0 / (1.0 + epsilon / 4.0);
    let gap = target.sqrt() - alpha.sqrt();
    debug_assert!(gap > 0.0, "sqrt(alpha) < sqrt(1/(1+eps/4)) must hold for eps in (0,1]");
    let mut r = (1.0 / (gap * gap)).floor() as usize;
    r = r.max(1);
    while {
        let root = 1.0 / (r as f64).sqrt() + alpha.sqrt();
        root * root >= target
    } {
        r += 1;
    }
    Ok(AlphaR { alpha, r })
}

/// Indices whose diagonal coefficient is at most `alpha` (inclusive).
pub fn alpha_set(f: &FrameSystem, alpha: f64) -> Result<Vec<usize>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FrameError::InvalidInput("alpha must lie in (0, 1)".into()));
    }
    let coeffs = diagonal_coefficients(f)?;
    Ok((0..coeffs.len()).filter(|&i| coeffs[i] <= alpha).collect())
}

/// Greedy maximal packing of disjoint R-balls with centers among the points,
/// nearest-center assignment, and sorted-order chunking into cells of size
/// at least `r` (at most `2r - 1` after merging the short remainder).
pub fn partition_cells(
    points: &[Point],
    geometry: &PointGeometry,
    big_r: f64,
    r: usize,
) -> Result<CellPartition> {
    if r == 0 {
        return Err(FrameError::InvalidInput("cell size r must be at least 1".into()));
    }
    if !(big_r > 0.0) {
        return Err(FrameError::InvalidInput("packing radius must be positive".into()));
    }
    if points.len() < r {
        return Err(FrameError::InsufficientDensity { required: r, found: points.len() });
    }
    // Maximal family of disjoint R-balls: centers pairwise >= 2R apart.
    let mut centers: Vec<usize> = Vec::new();
    for i in 0..points.len() {
        if centers
            .iter()
            .all(|&c| geometry.distance(&points[i], &points[c]) >= 2.0 * big_r)
        {
            centers.push(i);
        }
    }
    // Voronoi-style regions: nearest packed center, ties to the lowest id,
    // realizing B_R(y) subset X_y subset B_2R(y).
    let mut regions: Vec<Vec<usize>> = alloc::vec![Vec::new(); centers.len()];
    for i in 0..points.len() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (k, &c) in centers.iter().enumerate() {
            let d = geometry.distance(&points[i], &points[c]);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        regions[best].push(i);
    }
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for region in &regions {
        if region.len() < r {
            return Err(FrameError::InsufficientDensity { required: r, found: region.len() });
        }
        let full_chunks = region.len() / r;
        for k in 0..full_chunks {
            let end = if k + 1 == full_chunks { region.len() } else { (k + 1) * r };
            cells.push(region[k * r..end].to_vec());
        }
    }
    CellPartition::new(cells)
}

/// Per-iteration record of one removal pass.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub alpha: f64,
    pub m_plus_estimate: f64,
    pub lambda_alpha_size: usize,
    pub big_r: f64,
    /// Effective cell size used by the partition.
    pub r: usize,
    /// Cell size the theory's inequality asks for, logged for comparison.
    pub r_theory: usize,
    pub cell_count: usize,
    pub selector: SelectorResult,
    pub removed_count: usize,
    pub bounds_before: FrameBounds,
    pub new_bounds: FrameBounds,
    /// `A_before * (1 - achieved_bessel)`; the eigenvalue-computed lower
    /// bound must not fall below this.
    pub certified_lower: f64,
    pub d0_plus_before: f64,
    pub new_d0_minus: f64,
    pub new_d0_plus: f64,
    /// Observed contraction of the upper weighted density.
    pub delta_observed: f64,
    /// Worst-case contraction `1 - eps/(32 r) (C1/C2)(c/B)` from the theory.
    pub delta_theory: f64,
}

/// Result of one removal pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinStep {
    /// Removed indices, in the numbering of the parent system.
    pub removed: Vec<usize>,
    pub new_active: Vec<usize>,
    pub new_bounds: FrameBounds,
    pub record: IterationRecord,
}

const CERT_SLACK: f64 = 1e-8;

/// One removal pass over `f` restricted to `active`: Parseval transform,
/// alpha-sublevel set, ball packing into cells, selector search, removal,
/// and certification of the surviving frame bounds.
pub fn thin_once(f: &FrameSystem, active: &[usize], config: &ThinningConfig) -> Result<ThinStep> {
    thin_once_at(f, active, config, 0)
}

fn thin_once_at(
    f: &FrameSystem,
    active: &[usize],
    config: &ThinningConfig,
    iteration: usize,
) -> Result<ThinStep> {
    let f_act = f.subset(active)?;
    let bounds_before = frame_bounds(&f_act)?;
    if bounds_before.lower <= 0.0 {
        return Err(FrameError::InvalidInput("active system is not a frame on its span".into()));
    }
    let AlphaR { alpha, r: r_theory } = choose_alpha_r(config.epsilon)?;
    let coeffs = diagonal_coefficients(&f_act)?;
    let windows = config.windows(f_act.geometry())?;
    let measure = frame_measure_with_coeffs(&f_act, &windows, &coeffs)?;
    if measure.m_plus >= alpha {
        return Err(FrameError::NoProgress { m_plus: measure.m_plus, alpha });
    }
    let alpha_local: Vec<usize> = (0..coeffs.len()).filter(|&i| coeffs[i] <= alpha).collect();
    if alpha_local.is_empty() {
        return Err(FrameError::NoProgress { m_plus: measure.m_plus, alpha });
    }
    let r_eff = config.r_override.unwrap_or(r_theory).min(alpha_local.len()).max(1);

    let alpha_points: Vec<Point> =
        alpha_local.iter().map(|&i| f_act.index_points()[i].clone()).collect();
    let (big_r, partition) =
        select_packing_radius(&alpha_points, f_act.geometry(), r_eff, config.big_r_override)?;
    // Remap partition indices from sublevel-local to active-local.
    let cells: Vec<Vec<usize>> = partition
        .cells()
        .iter()
        .map(|cell| cell.iter().map(|&i| alpha_local[i]).collect())
        .collect();
    let partition = CellPartition::new(cells)?;

    let parseval = parseval_transform(&f_act)?;
    let opts = SelectorOptions {
        budget: config.selector_budget,
        restarts: config.selector_restarts,
        seed: config.seed.wrapping_add((iteration as u64).wrapping_mul(0x9e3779b97f4a7c15)),
    };
    let selector = find_selector(&parseval, &partition, config.selector_strategy, &opts)?;

    let removed: Vec<usize> = selector.selected.iter().map(|&i| active[i]).collect();
    let new_active: Vec<usize> =
        active.iter().copied().filter(|i| !removed.contains(i)).collect();
    if new_active.is_empty() {
        return Err(FrameError::NoProgress { m_plus: measure.m_plus, alpha });
    }
    let f_new = f.subset(&new_active)?;
    let new_bounds = frame_bounds(&f_new)?;
    let certified_lower = bounds_before.lower * (1.0 - selector.achieved_bessel);
    if new_bounds.lower < certified_lower - CERT_SLACK {
        return Err(FrameError::CertificateFailure(alloc::format!(
            "lower bound {} fell below the certified {}",
            new_bounds.lower,
            certified_lower
        )));
    }
    if new_bounds.upper > bounds_before.upper + CERT_SLACK {
        return Err(FrameError::CertificateFailure(alloc::format!(
            "upper bound {} exceeds the previous {}",
            new_bounds.upper,
            bounds_before.upper
        )));
    }

    let density_before = beurling_density(f_act.index_points(), f_act.geometry(), &windows)?;
    let density_after = beurling_density(f_new.index_points(), f_new.geometry(), &windows)?;
    let (c1, c2) = f_act.geometry().kernel_bounds();
    let (c_norm, _) = f_act.norm_bounds();
    let delta_theory = 1.0
        - (config.epsilon / (32.0 * r_eff as f64)) * (c1 / c2) * (c_norm / bounds_before.upper);
    let delta_observed = if density_before.d0_plus > 0.0 {
        density_after.d0_plus / density_before.d0_plus
    } else {
        1.0
    };

    let removed_count = removed.len();
    let record = IterationRecord {
        iteration,
        alpha,
        m_plus_estimate: measure.m_plus,
        lambda_alpha_size: alpha_local.len(),
        big_r,
        r: r_eff,
        r_theory,
        cell_count: partition.cell_count(),
        selector,
        removed_count,
        bounds_before,
        new_bounds,
        certified_lower,
        d0_plus_before: density_before.d0_plus,
        new_d0_minus: density_after.d0_minus,
        new_d0_plus: density_after.d0_plus,
        delta_observed,
        delta_theory,
    };
    Ok(ThinStep { removed, new_active, new_bounds, record })
}

/// Smallest radius on a scan grid such that every packed ball holds at
/// least `r` points; an explicit override skips the scan.
fn select_packing_radius(
    points: &[Point],
    geometry: &PointGeometry,
    r: usize,
    big_r_override: Option<f64>,
) -> Result<(f64, CellPartition)> {
    if let Some(big_r) = big_r_override {
        let p = partition_cells(points, geometry, big_r, r)?;
        return Ok((big_r, p));
    }
    let diameter = geometry.diameter();
    let mut last_err =
        FrameError::InsufficientDensity { required: r, found: points.len() };
    for k in 1..=64u32 {
        let big_r = diameter * k as f64 / 64.0;
        match partition_cells(points, geometry, big_r, r) {
            Ok(p) => return Ok((big_r, p)),
            Err(e @ FrameError::InsufficientDensity { .. }) => last_err = e,
            Err(e) => return Err(e),
        }
    }
    // A ball wider than the diameter holds every point.
    let big_r = diameter * 1.001;
    match partition_cells(points, geometry, big_r, r) {
        Ok(p) => Ok((big_r, p)),
        Err(_) => Err(last_err),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// Headline weighted lower density reached 1 + epsilon.
    ReachedTarget,
    /// Already at or below the target before any removal.
    AlreadyBelowTarget,
    /// The measure estimate reached alpha; nothing left to remove.
    NoProgress,
    /// The certified lower bound fell under the configured floor.
    LowerBoundFloor,
}

/// Full trace of a thinning run.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinningTrace {
    pub epsilon: f64,
    pub alpha: f64,
    pub r_theory: usize,
    /// A-priori iteration cap from the worst-case contraction, when finite.
    pub a_priori_cap: Option<u64>,
    pub iterations: Vec<IterationRecord>,
    /// Surviving indices, in the numbering of the input system.
    pub gamma: Vec<usize>,
    pub final_bounds: FrameBounds,
    pub final_d0_minus: f64,
    pub final_d0_plus: f64,
    pub stop_reason: StopReason,
}

/// Thinning failure carrying whatever trace was accumulated.
#[derive(Debug, Clone, PartialEq)]
pub enum ThinningError {
    /// Max iterations exhausted with the density still above target.
    Partial(ThinningTrace),
    Frame(FrameError),
}

impl core::fmt::Display for ThinningError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ThinningError::Partial(t) => write!(
                f,
                "max iterations exhausted with D0- = {} above target {}",
                t.final_d0_minus,
                1.0 + t.epsilon
            ),
            ThinningError::Frame(e) => write!(f, "{e}"),
        }
    }
}

impl From<FrameError> for ThinningError {
    fn from(e: FrameError) -> Self {
        ThinningError::Frame(e)
    }
}

/// Repeated removal passes until the headline weighted lower density falls
/// to 1 + epsilon, progress stalls, or the iteration budget runs out.
pub fn thin_to_density(
    f: &FrameSystem,
    config: &ThinningConfig,
) -> core::result::Result<ThinningTrace, ThinningError> {
    let AlphaR { alpha, r: r_theory } = choose_alpha_r(config.epsilon)?;
    let windows = config.windows(f.geometry())?;
    let initial_bounds = frame_bounds(f)?;
    if initial_bounds.lower <= 0.0 {
        return Err(FrameError::InvalidInput("input system is not a frame on its span".into()).into());
    }
    let (c1, c2) = f.geometry().kernel_bounds();
    let (c_norm, _) = f.norm_bounds();
    let delta = 1.0
        - (config.epsilon / (32.0 * r_theory as f64)) * (c1 / c2)
            * (c_norm / initial_bounds.upper);
    let a_priori_cap = a_priori_iteration_cap(
        config.epsilon,
        delta,
        c_norm,
        initial_bounds.upper,
    );

    let mut active: Vec<usize> = (0..f.len()).collect();
    let mut iterations: Vec<IterationRecord> = Vec::new();
    let mut bounds = initial_bounds;
    let target = 1.0 + config.epsilon;

    let density = beurling_density(f.index_points(), f.geometry(), &windows)?;
    let mut d0_minus = density.d0_minus;
    let mut d0_plus = density.d0_plus;

    let mut stop_reason = if d0_minus <= target {
        Some(StopReason::AlreadyBelowTarget)
    } else {
        None
    };

    while stop_reason.is_none() {
        if iterations.len() >= config.max_iterations {
            let trace = ThinningTrace {
                epsilon: config.epsilon,
                alpha,
                r_theory,
                a_priori_cap,
                iterations,
                gamma: active,
                final_bounds: bounds,
                final_d0_minus: d0_minus,
                final_d0_plus: d0_plus,
                stop_reason: StopReason::NoProgress,
            };
            return Err(ThinningError::Partial(trace));
        }
        match thin_once_at(f, &active, config, iterations.len()) {
            Ok(step) => {
                active = step.new_active.clone();
                bounds = step.new_bounds;
                d0_minus = step.record.new_d0_minus;
                d0_plus = step.record.new_d0_plus;
                iterations.push(step.record);
                if d0_minus <= target {
                    stop_reason = Some(StopReason::ReachedTarget);
                } else if bounds.lower < config.min_lower_bound {
                    stop_reason = Some(StopReason::LowerBoundFloor);
                }
            }
            Err(FrameError::NoProgress { .. }) => {
                stop_reason = Some(StopReason::NoProgress);
            }
            Err(e) => return Err(e.into()),
        }
    }

    Ok(ThinningTrace {
        epsilon: config.epsilon,
        alpha,
        r_theory,
        a_priori_cap,
        iterations,
        gamma: active,
        final_bounds: bounds,
        final_d0_minus: d0_minus,
        final_d0_plus: d0_plus,
        stop_reason: stop_reason.unwrap(),
    })
}

/// Smallest N with `delta^N B/c <= 1 + eps`, when the contraction is real.
fn a_priori_iteration_cap(epsilon: f64, delta: f64, c_norm: f64, b: f64) -> Option<u64> {
    if !(delta > 0.0 && delta < 1.0) || !(c_norm > 0.0) {
        return None;
    }
    let ratio = b / c_norm;
    if ratio <= 1.0 + epsilon {
        return Some(0);
    }
    let n = ((1.0 + epsilon).ln() - ratio.ln()) / delta.ln();
    Some(n.ceil() as u64)
}

/// Both sides of the sublevel-density inequality
/// `((alpha - M+)/alpha) D0-(Lambda) <= D0-(Lambda_alpha)` at finite radius.
#[derive(Debug, Clone, PartialEq)]
pub struct NearCriticalReport {
    pub alpha: f64,
    pub m_plus: f64,
    pub d0_minus_full: f64,
    pub d0_minus_sublevel: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub tolerance_band: f64,
}

pub fn check_near_critical_lemma(
    f: &FrameSystem,
    alpha: f64,
    windows: &WindowFamily,
    tolerance_band: f64,
) -> Result<NearCriticalReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(FrameError::InvalidInput("alpha must lie in (0, 1)".into()));
    }
    let coeffs = diagonal_coefficients(f)?;
    let measure = frame_measure_with_coeffs(f, windows, &coeffs)?;
    let density = beurling_density(f.index_points(), f.geometry(), windows)?;
    let sub: Vec<Point> = (0..coeffs.len())
        .filter(|&i| coeffs[i] <= alpha)
        .map(|i| f.index_points()[i].clone())
        .collect();
    let d0_sub = if sub.is_empty() {
        0.0
    } else {
        beurling_density(&sub, f.geometry(), windows)?.d0_minus
    };
    let lhs = (alpha - measure.m_plus) / alpha * density.d0_minus;
    let holds = lhs <= 0.0 || lhs <= d0_sub * (1.0 + tolerance_band);
    Ok(NearCriticalReport {
        alpha,
        m_plus: measure.m_plus,
        d0_minus_full: density.d0_minus,
        d0_minus_sublevel: d0_sub,
        lhs,
        rhs: d0_sub,
        holds,
        tolerance_band,
    })
}
