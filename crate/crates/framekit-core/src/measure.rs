//! Windowed frame measure M-+/- and checks of the measure/density
//! relations. Measures and densities are always reported at the same
//! headline radius so products are comparable.

use alloc::vec::Vec;

use crate::error::{FrameError, Result};
use crate::frame::{diagonal_coefficients, frame_bounds, FrameSystem};
use crate::geometry::{ball_indices, beurling_density, DensityReport, WindowFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureEntry {
    pub center_index: usize,
    pub radius: f64,
    pub count: usize,
    pub sum_diagonal: f64,
    pub average: f64,
}

/// Windowed averages of the diagonal coefficients, with headline values
/// taken at the largest radius.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub entries: Vec<MeasureEntry>,
    pub headline_radius: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    pub global_average: f64,
    /// Windows skipped because they contain no index points.
    pub empty_window_count: usize,
}

/// Average of `<g, S+ g>` over the index points in each window.
pub fn frame_measure(f: &FrameSystem, windows: &WindowFamily) -> Result<MeasureReport> {
    let coeffs = diagonal_coefficients(f)?;
    frame_measure_with_coeffs(f, windows, &coeffs)
}

pub(crate) fn frame_measure_with_coeffs(
    f: &FrameSystem,
    windows: &WindowFamily,
    coeffs: &[f64],
) -> Result<MeasureReport> {
    let geom = f.geometry();
    let points = f.index_points();
    let mut entries = Vec::new();
    let mut empty = 0usize;
    for (ci, center) in windows.centers.iter().enumerate() {
        for &r in &windows.radii {
            let idx = ball_indices(points, center, r, geom);
            if idx.is_empty() {
                empty += 1;
                continue;
            }
            let sum: f64 = idx.iter().map(|&i| coeffs[i]).sum();
            entries.push(MeasureEntry {
                center_index: ci,
                radius: r,
                count: idx.len(),
                sum_diagonal: sum,
                average: sum / idx.len() as f64,
            });
        }
    }
    let headline = windows.headline_radius();
    let at_headline: Vec<&MeasureEntry> =
        entries.iter().filter(|e| e.radius == headline).collect();
    if at_headline.is_empty() {
        return Err(FrameError::InvalidInput(
            "no window at the headline radius contains an index point".into(),
        ));
    }
    let m_minus = at_headline.iter().map(|e| e.average).fold(f64::INFINITY, f64::min);
    let m_plus = at_headline.iter().map(|e| e.average).fold(0.0_f64, f64::max);
    let global_average = coeffs.iter().sum::<f64>() / coeffs.len() as f64;
    Ok(MeasureReport {
        entries,
        headline_radius: headline,
        m_minus,
        m_plus,
        global_average,
        empty_window_count: empty,
    })
}

/// Products of frame measure and weighted density that the measure/density
/// relation predicts to be 1; deviations are reported, not asserted.
#[derive(Debug, Clone, PartialEq)]
pub struct FrdReport {
    pub m_plus: f64,
    pub m_minus: f64,
    pub d0_minus: f64,
    pub d0_plus: f64,
    pub product_plus: f64,
    pub product_minus: f64,
    pub max_deviation: f64,
    pub headline_radius: f64,
}

pub fn verify_frd(f: &FrameSystem, windows: &WindowFamily) -> Result<FrdReport> {
    let measure = frame_measure(f, windows)?;
    let density = beurling_density(f.index_points(), f.geometry(), windows)?;
    Ok(frd_from_reports(&measure, &density))
}

pub fn frd_from_reports(measure: &MeasureReport, density: &DensityReport) -> FrdReport {
    let product_plus = measure.m_plus * density.d0_minus;
    let product_minus = measure.m_minus * density.d0_plus;
    FrdReport {
        m_plus: measure.m_plus,
        m_minus: measure.m_minus,
        d0_minus: density.d0_minus,
        d0_plus: density.d0_plus,
        product_plus,
        product_minus,
        max_deviation: (product_plus - 1.0).abs().max((product_minus - 1.0).abs()),
        headline_radius: measure.headline_radius,
    }
}

/// Evaluation of the two density sandwich inequalities
/// `D0- >= 1` and `A/C <= D0- <= D0+ <= B/c` at finite radius.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityBoundsReport {
    pub d0_minus: f64,
    pub d0_plus: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub c_min_norm: f64,
    pub c_max_norm: f64,
    pub frame_lower: f64,
    pub frame_upper: f64,
    /// `D0- >= 1` within the tolerance band.
    pub critical_holds: bool,
    /// `A/C <= D0- <= D0+ <= B/c` within the tolerance band.
    pub sandwich_holds: bool,
    pub tolerance_band: f64,
    pub slack_lower: f64,
    pub slack_upper: f64,
}

pub const DEFAULT_TOLERANCE_BAND: f64 = 0.1;

pub fn check_density_bounds(
    f: &FrameSystem,
    windows: &WindowFamily,
    tolerance_band: f64,
) -> Result<DensityBoundsReport> {
    let bounds = frame_bounds(f)?;
    if bounds.lower <= 0.0 {
        return Err(FrameError::InvalidInput("system is not a frame on its span".into()));
    }
    let (c, cc) = f.norm_bounds();
    let density = beurling_density(f.index_points(), f.geometry(), windows)?;
    let lower_bound = bounds.lower / cc;
    let upper_bound = bounds.upper / c;
    let band = 1.0 + tolerance_band;
    Ok(DensityBoundsReport {
        d0_minus: density.d0_minus,
        d0_plus: density.d0_plus,
        lower_bound,
        upper_bound,
        c_min_norm: c,
        c_max_norm: cc,
        frame_lower: bounds.lower,
        frame_upper: bounds.upper,
        critical_holds: density.d0_minus * band >= 1.0,
        sandwich_holds: density.d0_minus * band >= lower_bound
            && density.d0_plus <= upper_bound * band
            && density.d0_minus <= density.d0_plus,
        tolerance_band,
        slack_lower: density.d0_minus - lower_bound,
        slack_upper: upper_bound - density.d0_plus,
    })
}
