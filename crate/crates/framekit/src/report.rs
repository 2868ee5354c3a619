//! Serializable report envelopes and tidy CSV emitters. Every JSON output
//! embeds a provenance block so a result file alone identifies the tool
//! version, seed, and configuration that produced it.

use framekit_core::{
    choose_alpha_r, theorem_bound, DensityReport, FrameBounds, FrdReport, IterationRecord,
    MeasureReport, NearCriticalReport, SelectorResult, StopReason, Strategy, ThinningConfig,
    ThinningTrace,
};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Theory constants for the configured epsilon, recorded alongside every
/// result.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Constants {
    pub alpha: f64,
    pub r: usize,
    pub delta: f64,
    pub theorem_bound: f64,
}

impl Constants {
    pub fn for_epsilon(epsilon: f64) -> Self {
        let ar = choose_alpha_r(epsilon).expect("epsilon validated upstream");
        // Geometry-free worst case: kernel ratio and norm ratio both 1.
        let delta = 1.0 - epsilon / (32.0 * ar.r as f64);
        Constants {
            alpha: ar.alpha,
            r: ar.r,
            delta,
            theorem_bound: theorem_bound(ar.r, ar.alpha),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Provenance {
    pub tool_version: String,
    pub seed: u64,
    pub config_hash: String,
    pub constants: Constants,
}

impl Provenance {
    pub fn new<C: Serialize>(seed: u64, epsilon: f64, config: &C) -> Self {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config_hash: config_hash(config),
            constants: Constants::for_epsilon(epsilon),
        }
    }
}

/// SHA-256 over the canonical JSON encoding of the effective configuration.
pub fn config_hash<C: Serialize>(config: &C) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub provenance: Provenance,
    pub report: T,
}

// Core report types mirror into plain serde structs; the core crate stays
// serialization-free.

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsOut {
    pub lower: f64,
    pub upper: f64,
    pub rank: usize,
    pub on_span: bool,
}

impl From<&FrameBounds> for BoundsOut {
    fn from(b: &FrameBounds) -> Self {
        BoundsOut { lower: b.lower, upper: b.upper, rank: b.rank, on_span: b.on_span }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEntryOut {
    pub center_index: usize,
    pub radius: f64,
    pub count: usize,
    pub measure: f64,
    pub ratio: f64,
    pub weighted_measure: f64,
    pub weighted_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityOut {
    pub headline_radius: f64,
    pub d_minus: f64,
    pub d_plus: f64,
    pub d0_minus: f64,
    pub d0_plus: f64,
    pub stabilization: f64,
    pub entries: Vec<DensityEntryOut>,
}

impl From<&DensityReport> for DensityOut {
    fn from(r: &DensityReport) -> Self {
        DensityOut {
            headline_radius: r.headline_radius,
            d_minus: r.d_minus,
            d_plus: r.d_plus,
            d0_minus: r.d0_minus,
            d0_plus: r.d0_plus,
            stabilization: r.stabilization,
            entries: r
                .entries
                .iter()
                .map(|e| DensityEntryOut {
                    center_index: e.center_index,
                    radius: e.radius,
                    count: e.count,
                    measure: e.measure,
                    ratio: e.ratio,
                    weighted_measure: e.weighted_measure,
                    weighted_ratio: e.weighted_ratio,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureEntryOut {
    pub center_index: usize,
    pub radius: f64,
    pub count: usize,
    pub sum_diagonal: f64,
    pub average: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureOut {
    pub headline_radius: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    pub global_average: f64,
    pub empty_window_count: usize,
    pub entries: Vec<MeasureEntryOut>,
}

impl From<&MeasureReport> for MeasureOut {
    fn from(r: &MeasureReport) -> Self {
        MeasureOut {
            headline_radius: r.headline_radius,
            m_minus: r.m_minus,
            m_plus: r.m_plus,
            global_average: r.global_average,
            empty_window_count: r.empty_window_count,
            entries: r
                .entries
                .iter()
                .map(|e| MeasureEntryOut {
                    center_index: e.center_index,
                    radius: e.radius,
                    count: e.count,
                    sum_diagonal: e.sum_diagonal,
                    average: e.average,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrdOut {
    pub m_plus: f64,
    pub m_minus: f64,
    pub d0_minus: f64,
    pub d0_plus: f64,
    pub product_plus: f64,
    pub product_minus: f64,
    pub max_deviation: f64,
    pub headline_radius: f64,
}

impl From<&FrdReport> for FrdOut {
    fn from(r: &FrdReport) -> Self {
        FrdOut {
            m_plus: r.m_plus,
            m_minus: r.m_minus,
            d0_minus: r.d0_minus,
            d0_plus: r.d0_plus,
            product_plus: r.product_plus,
            product_minus: r.product_minus,
            max_deviation: r.max_deviation,
            headline_radius: r.headline_radius,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NearCriticalOut {
    pub alpha: f64,
    pub m_plus: f64,
    pub d0_minus_full: f64,
    pub d0_minus_sublevel: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub tolerance_band: f64,
}

impl From<&NearCriticalReport> for NearCriticalOut {
    fn from(r: &NearCriticalReport) -> Self {
        NearCriticalOut {
            alpha: r.alpha,
            m_plus: r.m_plus,
            d0_minus_full: r.d0_minus_full,
            d0_minus_sublevel: r.d0_minus_sublevel,
            lhs: r.lhs,
            rhs: r.rhs,
            holds: r.holds,
            tolerance_band: r.tolerance_band,
        }
    }
}

fn strategy_name(s: Strategy) -> &'static str {
    match s {
        Strategy::Exhaustive => "exhaustive",
        Strategy::Greedy => "greedy",
        Strategy::Randomized => "random",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectorOut {
    pub selected: Vec<usize>,
    pub achieved_bessel: f64,
    pub theorem_bound: f64,
    pub certified: bool,
    pub strategy: String,
    pub candidates_examined: u64,
    pub restarts_used: u32,
}

impl From<&SelectorResult> for SelectorOut {
    fn from(r: &SelectorResult) -> Self {
        SelectorOut {
            selected: r.selected.clone(),
            achieved_bessel: r.achieved_bessel,
            theorem_bound: r.theorem_bound,
            certified: r.certified,
            strategy: strategy_name(r.strategy).to_string(),
            candidates_examined: r.candidates_examined,
            restarts_used: r.restarts_used,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IterationOut {
    pub iteration: usize,
    pub alpha: f64,
    pub m_plus_estimate: f64,
    pub lambda_alpha_size: usize,
    pub big_r: f64,
    pub r: usize,
    pub r_theory: usize,
    pub cell_count: usize,
    pub selector: SelectorOut,
    pub removed_count: usize,
    pub bounds_before: BoundsOut,
    pub new_bounds: BoundsOut,
    pub certified_lower: f64,
    pub d0_plus_before: f64,
    pub new_d0_minus: f64,
    pub new_d0_plus: f64,
    pub delta_observed: f64,
    pub delta_theory: f64,
}

impl From<&IterationRecord> for IterationOut {
    fn from(r: &IterationRecord) -> Self {
        IterationOut {
            iteration: r.iteration,
            alpha: r.alpha,
            m_plus_estimate: r.m_plus_estimate,
            lambda_alpha_size: r.lambda_alpha_size,
            big_r: r.big_r,
            r: r.r,
            r_theory: r.r_theory,
            cell_count: r.cell_count,
            selector: SelectorOut::from(&r.selector),
            removed_count: r.removed_count,
            bounds_before: BoundsOut::from(&r.bounds_before),
            new_bounds: BoundsOut::from(&r.new_bounds),
            certified_lower: r.certified_lower,
            d0_plus_before: r.d0_plus_before,
            new_d0_minus: r.new_d0_minus,
            new_d0_plus: r.new_d0_plus,
            delta_observed: r.delta_observed,
            delta_theory: r.delta_theory,
        }
    }
}

fn stop_reason_name(s: StopReason) -> &'static str {
    match s {
        StopReason::ReachedTarget => "reached_target",
        StopReason::AlreadyBelowTarget => "already_below_target",
        StopReason::NoProgress => "no_progress",
        StopReason::LowerBoundFloor => "lower_bound_floor",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceOut {
    pub epsilon: f64,
    pub alpha: f64,
    pub r_theory: usize,
    pub a_priori_cap: Option<u64>,
    pub stop_reason: String,
    pub surviving_indices: Vec<usize>,
    pub final_bounds: BoundsOut,
    pub final_d0_minus: f64,
    pub final_d0_plus: f64,
    pub iterations: Vec<IterationOut>,
}

impl From<&ThinningTrace> for TraceOut {
    fn from(t: &ThinningTrace) -> Self {
        TraceOut {
            epsilon: t.epsilon,
            alpha: t.alpha,
            r_theory: t.r_theory,
            a_priori_cap: t.a_priori_cap,
            stop_reason: stop_reason_name(t.stop_reason).to_string(),
            surviving_indices: t.gamma.clone(),
            final_bounds: BoundsOut::from(&t.final_bounds),
            final_d0_minus: t.final_d0_minus,
            final_d0_plus: t.final_d0_plus,
            iterations: t.iterations.iter().map(IterationOut::from).collect(),
        }
    }
}

/// Serializable mirror of the thinning configuration, for hashing and
/// provenance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThinningConfigOut {
    pub epsilon: f64,
    pub r_override: Option<usize>,
    pub big_r_override: Option<f64>,
    pub selector_strategy: String,
    pub selector_budget: u128,
    pub selector_restarts: u32,
    pub max_iterations: usize,
    pub min_lower_bound: f64,
    pub density_radius: f64,
    pub seed: u64,
}

impl From<&ThinningConfig> for ThinningConfigOut {
    fn from(c: &ThinningConfig) -> Self {
        ThinningConfigOut {
            epsilon: c.epsilon,
            r_override: c.r_override,
            big_r_override: c.big_r_override,
            selector_strategy: strategy_name(c.selector_strategy).to_string(),
            selector_budget: c.selector_budget,
            selector_restarts: c.selector_restarts,
            max_iterations: c.max_iterations,
            min_lower_bound: c.min_lower_bound,
            density_radius: c.density_radius,
            seed: c.seed,
        }
    }
}

pub fn to_json<T: Serialize>(envelope: &T) -> String {
    let mut s = serde_json::to_string_pretty(envelope).expect("report serializes");
    s.push('\n');
    s
}

fn push_row(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

/// One row per (window, radius) pair.
pub fn density_csv(r: &DensityReport) -> String {
    let mut out = String::new();
    out.push_str("center_index,radius,count,measure,ratio,weighted_measure,weighted_ratio\n");
    for e in &r.entries {
        push_row(
            &mut out,
            &[
                e.center_index.to_string(),
                format!("{:?}", e.radius),
                e.count.to_string(),
                format!("{:?}", e.measure),
                format!("{:?}", e.ratio),
                format!("{:?}", e.weighted_measure),
                format!("{:?}", e.weighted_ratio),
            ],
        );
    }
    out
}

/// One row per nonempty (window, radius) pair.
pub fn measure_csv(r: &MeasureReport) -> String {
    let mut out = String::new();
    out.push_str("center_index,radius,count,sum_diagonal,average\n");
    for e in &r.entries {
        push_row(
            &mut out,
            &[
                e.center_index.to_string(),
                format!("{:?}", e.radius),
                e.count.to_string(),
                format!("{:?}", e.sum_diagonal),
                format!("{:?}", e.average),
            ],
        );
    }
    out
}

/// One summary row per thinning iteration.
pub fn trace_csv(t: &ThinningTrace) -> String {
    let mut out = String::new();
    out.push_str(
        "iteration,alpha,m_plus,lambda_alpha_size,big_r,r,cell_count,removed,\
         lower_before,lower_after,upper_after,certified_lower,d0_minus,d0_plus,\
         delta_observed,delta_theory\n",
    );
    for r in &t.iterations {
        push_row(
            &mut out,
            &[
                r.iteration.to_string(),
                format!("{:?}", r.alpha),
                format!("{:?}", r.m_plus_estimate),
                r.lambda_alpha_size.to_string(),
                format!("{:?}", r.big_r),
                r.r.to_string(),
                r.cell_count.to_string(),
                r.removed_count.to_string(),
                format!("{:?}", r.bounds_before.lower),
                format!("{:?}", r.new_bounds.lower),
                format!("{:?}", r.new_bounds.upper),
                format!("{:?}", r.certified_lower),
                format!("{:?}", r.new_d0_minus),
                format!("{:?}", r.new_d0_plus),
                format!("{:?}", r.delta_observed),
                format!("{:?}", r.delta_theory),
            ],
        );
    }
    out
}

/// Single-row CSV with the identity products.
pub fn frd_csv(r: &FrdReport) -> String {
    let mut out = String::new();
    out.push_str(
        "m_plus,m_minus,d0_minus,d0_plus,product_plus,product_minus,max_deviation,headline_radius\n",
    );
    push_row(
        &mut out,
        &[
            format!("{:?}", r.m_plus),
            format!("{:?}", r.m_minus),
            format!("{:?}", r.d0_minus),
            format!("{:?}", r.d0_plus),
            format!("{:?}", r.product_plus),
            format!("{:?}", r.product_minus),
            format!("{:?}", r.max_deviation),
            format!("{:?}", r.headline_radius),
        ],
    );
    out
}
