//! Search-and-verify stand-in for the selector form of Weaver's conjecture:
//! given a Bessel system with bound 1 and a partition into cells, pick one
//! index per cell so the selected subsystem has small Bessel bound, and
//! certify the result against the bound `(1/sqrt(r) + sqrt(alpha))^2`.
//!
//! The underlying existence theorem is nonconstructive; exhaustive search is
//! the ground-truth oracle at desk scale and greedy is the default beyond it.

use alloc::format;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FrameError, Result};
use crate::frame::FrameSystem;
use crate::linalg::{self, hermitian_eigen, CMatrix};
#[allow(unused_imports)]
use num_traits::Float;

/// Disjoint index cells over a frame system; the union may be a strict
/// subset of all indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPartition {
    cells: Vec<Vec<usize>>,
}

impl CellPartition {
    pub fn new(cells: Vec<Vec<usize>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(FrameError::InvalidInput("partition needs at least one cell".into()));
        }
        let mut seen: Vec<usize> = Vec::new();
        for (k, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(FrameError::InvalidInput(format!("cell {k} is empty")));
            }
            seen.extend_from_slice(cell);
        }
        let total = seen.len();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != total {
            return Err(FrameError::InvalidInput("cells are not pairwise disjoint".into()));
        }
        Ok(CellPartition { cells })
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_count(&self) -> usize {
        self.cells.len()
    }

    pub fn r_min(&self) -> usize {
        self.cells.iter().map(|c| c.len()).min().unwrap_or(0)
    }

    pub fn r_max(&self) -> usize {
        self.cells.iter().map(|c| c.len()).max().unwrap_or(0)
    }

    pub fn all_indices(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self.cells.iter().flatten().copied().collect();
        idx.sort_unstable();
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    Greedy,
    Randomized,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorOptions {
    /// Max number of selectors exhaustive search may enumerate.
    pub budget: u128,
    /// Independent uniform draws for the randomized strategy.
    pub restarts: u32,
    pub seed: u64,
}

impl Default for SelectorOptions {
    fn default() -> Self {
        SelectorOptions { budget: 1_000_000, restarts: 64, seed: 0 }
    }
}

/// Outcome of a selector search, with the certification data.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectorResult {
    /// One index per cell, in cell order.
    pub selected: Vec<usize>,
    pub achieved_bessel: f64,
    /// `(1/sqrt(r_min) + sqrt(alpha))^2`.
    pub theorem_bound: f64,
    pub certified: bool,
    pub strategy: Strategy,
    pub candidates_examined: u64,
    pub restarts_used: u32,
}

const CERT_TOL: f64 = 1e-10;

/// `alpha = max over the subset of ||g_i||^2`.
pub fn alpha_norm(f: &FrameSystem, subset: &[usize]) -> f64 {
    subset
        .iter()
        .map(|&i| linalg::norm_sqr(f.vector(i)))
        .fold(0.0_f64, f64::max)
}

fn bessel_of_selection(f: &FrameSystem, selected: &[usize]) -> Result<f64> {
    let mut m = CMatrix::zeros(f.ambient_dim(), f.ambient_dim());
    for &i in selected {
        m.add_outer(f.vector(i));
    }
    m.hermitize();
    let eig = hermitian_eigen(&m)?;
    Ok(eig.values.last().copied().unwrap_or(0.0).max(0.0))
}

pub fn theorem_bound(r_min: usize, alpha: f64) -> f64 {
    let root = 1.0 / (r_min as f64).sqrt() + alpha.sqrt();
    root * root
}

/// Find a selector (one index per cell) minimizing the Bessel bound of the
/// selected subsystem under the chosen strategy.
///
/// The system must be Bessel with bound at most 1 on the union of cells
/// (e.g. a Parseval transform restricted to a subset).
pub fn find_selector(
    f: &FrameSystem,
    partition: &CellPartition,
    strategy: Strategy,
    opts: &SelectorOptions,
) -> Result<SelectorResult> {
    let union = partition.all_indices();
    let union_bessel = bessel_of_selection(f, &union)?;
    if union_bessel > 1.0 + 1e-8 {
        return Err(FrameError::InvalidInput(format!(
            "system restricted to the cells has Bessel bound {union_bessel} > 1"
        )));
    }
    let alpha = alpha_norm(f, &union);
    let bound = theorem_bound(partition.r_min(), alpha);

    let (selected, achieved, examined, restarts_used) = match strategy {
        Strategy::Exhaustive => {
            let (sel, ach, ex) = exhaustive_search(f, partition, opts.budget)?;
            (sel, ach, ex, 0)
        }
        Strategy::Greedy => {
            let (sel, ach, ex) = greedy_search(f, partition)?;
            (sel, ach, ex, 0)
        }
        Strategy::Randomized => randomized_search(f, partition, opts)?,
    };

    Ok(SelectorResult {
        selected,
        achieved_bessel: achieved,
        theorem_bound: bound,
        certified: achieved <= bound + CERT_TOL,
        strategy,
        candidates_examined: examined,
        restarts_used,
    })
}

/// Keep the better of two candidates; ties resolved by lexicographically
/// smaller selector so results are independent of evaluation order.
fn better(a: &(Vec<usize>, f64), b: &(Vec<usize>, f64)) -> bool {
    a.1 < b.1 || (a.1 == b.1 && a.0 < b.0)
}

fn exhaustive_search(
    f: &FrameSystem,
    partition: &CellPartition,
    budget: u128,
) -> Result<(Vec<usize>, f64, u64)> {
    let cells = partition.cells();
    let mut total: u128 = 1;
    for c in cells {
        total = total.saturating_mul(c.len() as u128);
        if total > budget {
            return Err(FrameError::BudgetExceeded { required: total, budget });
        }
    }
    let mut counters = alloc::vec![0usize; cells.len()];
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut examined: u64 = 0;
    loop {
        let selected: Vec<usize> =
            counters.iter().enumerate().map(|(k, &j)| cells[k][j]).collect();
        let achieved = bessel_of_selection(f, &selected)?;
        examined += 1;
        let cand = (selected, achieved);
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
        // Mixed-radix increment.
        let mut k = cells.len();
        loop {
            if k == 0 {
                let (sel, ach) = best.unwrap();
                return Ok((sel, ach, examined));
            }
            k -= 1;
            counters[k] += 1;
            if counters[k] < cells[k].len() {
                break;
            }
            counters[k] = 0;
        }
    }
}

fn greedy_search(f: &FrameSystem, partition: &CellPartition) -> Result<(Vec<usize>, f64, u64)> {
    let cells = partition.cells();
    // Process cells in decreasing max-norm order, lowest cell id on ties:
    // hardest cells are placed while the selected set is small.
    let mut order: Vec<usize> = (0..cells.len()).collect();
    let cell_alpha: Vec<f64> = cells.iter().map(|c| alpha_norm(f, c)).collect();
    order.sort_by(|&a, &b| {
        cell_alpha[b].partial_cmp(&cell_alpha[a]).unwrap().then(a.cmp(&b))
    });

    let mut acc = CMatrix::zeros(f.ambient_dim(), f.ambient_dim());
    let mut selected_by_cell = alloc::vec![usize::MAX; cells.len()];
    let mut examined: u64 = 0;
    for &k in &order {
        let mut best_idx = usize::MAX;
        let mut best_val = f64::INFINITY;
        for &i in &cells[k] {
            let mut cand = acc.clone();
            cand.add_outer(f.vector(i));
            let eig = hermitian_eigen(&cand)?;
            let val = eig.values.last().copied().unwrap_or(0.0);
            examined += 1;
            // Ties broken by lowest index; cells are stored sorted.
            if val < best_val {
                best_val = val;
                best_idx = i;
            }
        }
        acc.add_outer(f.vector(best_idx));
        selected_by_cell[k] = best_idx;
    }
    let achieved = bessel_of_selection(f, &selected_by_cell)?;
    Ok((selected_by_cell, achieved, examined))
}

fn randomized_search(
    f: &FrameSystem,
    partition: &CellPartition,
    opts: &SelectorOptions,
) -> Result<(Vec<usize>, f64, u64, u32)> {
    let cells = partition.cells();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(0x5e1ec70e); // selector module stream id
    let restarts = opts.restarts.max(1);
    let mut best: Option<(Vec<usize>, f64)> = None;
    let mut examined: u64 = 0;
    for _ in 0..restarts {
        let selected: Vec<usize> =
            cells.iter().map(|c| c[rng.gen_range(0..c.len())]).collect();
        let achieved = bessel_of_selection(f, &selected)?;
        examined += 1;
        let cand = (selected, achieved);
        if best.as_ref().map_or(true, |b| better(&cand, b)) {
            best = Some(cand);
        }
    }
    let (sel, ach) = best.unwrap();
    Ok((sel, ach, examined, restarts))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectorCertificate {
    pub achieved: f64,
    pub theorem_bound: f64,
    pub certified: bool,
}

/// Recompute the selected subsystem's Bessel bound with a fresh
/// eigendecomposition and re-check the one-per-cell constraint.
pub fn verify_selector_bound(
    f: &FrameSystem,
    partition: &CellPartition,
    result: &SelectorResult,
) -> Result<SelectorCertificate> {
    let cells = partition.cells();
    if result.selected.len() != cells.len() {
        return Err(FrameError::CertificateFailure(format!(
            "selector has {} picks for {} cells",
            result.selected.len(),
            cells.len()
        )));
    }
    for (k, cell) in cells.iter().enumerate() {
        let picks = result.selected.iter().filter(|i| cell.contains(i)).count();
        if picks != 1 {
            return Err(FrameError::CertificateFailure(format!(
                "cell {k} has {picks} selected indices, expected exactly 1"
            )));
        }
    }
    let achieved = bessel_of_selection(f, &result.selected)?;
    if (achieved - result.achieved_bessel).abs() > CERT_TOL {
        return Err(FrameError::CertificateFailure(format!(
            "recomputed Bessel bound {achieved} differs from reported {}",
            result.achieved_bessel
        )));
    }
    let alpha = alpha_norm(f, &partition.all_indices());
    let bound = theorem_bound(partition.r_min(), alpha);
    Ok(SelectorCertificate {
        achieved,
        theorem_bound: bound,
        certified: achieved <= bound + CERT_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, PointGeometry};
    use alloc::vec;
    use alloc::vec::Vec;
    use num_complex::Complex64;

    fn system(vectors: Vec<Vec<Complex64>>) -> FrameSystem {
        let n = vectors.len();
        let dim = vectors[0].len();
        let geom = PointGeometry::line(0.0, n as f64).unwrap();
        let points: Vec<Point> = (0..n).map(|i| vec![i as f64]).collect();
        FrameSystem::new(dim, vectors, points, geom, None).unwrap()
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Cells of pairwise-orthogonal vectors of norm^2 alpha: any selector
    /// achieves exactly alpha.
    #[test]
    fn orthogonal_cells_achieve_alpha() {
        let a: f64 = 0.25;
        let s = a.sqrt();
        let dim = 4;
        let mut vectors = Vec::new();
        for i in 0..dim {
            let mut v = vec![c(0.0); dim];
            v[i] = c(s);
            vectors.push(v.clone());
            vectors.push(v);
        }
        let f = system(vectors);
        let p = CellPartition::new(vec![vec![0, 1], vec![2, 3], vec![4, 5], vec![6, 7]]).unwrap();
        let res =
            find_selector(&f, &p, Strategy::Exhaustive, &SelectorOptions::default()).unwrap();
        assert!((res.achieved_bessel - a).abs() < 1e-12);
        assert!(res.certified);
        verify_selector_bound(&f, &p, &res).unwrap();
    }

    /// K cells each holding r copies of the same vector: every selector
    /// achieves K * alpha.
    #[test]
    fn rank_one_copies() {
        let alpha: f64 = 0.15;
        let k_cells = 3;
        let r = 2;
        let v = vec![c(alpha.sqrt()), c(0.0)];
        let vectors = vec![v; k_cells * r];
        let f = system(vectors);
        let cells: Vec<Vec<usize>> =
            (0..k_cells).map(|k| (0..r).map(|j| k * r + j).collect()).collect();
        let p = CellPartition::new(cells).unwrap();
        let res =
            find_selector(&f, &p, Strategy::Exhaustive, &SelectorOptions::default()).unwrap();
        let expect = k_cells as f64 * alpha;
        assert!((res.achieved_bessel - expect).abs() < 1e-12);
        let bound = theorem_bound(r, alpha);
        assert_eq!(res.certified, expect <= bound + 1e-10);
    }

    #[test]
    fn corrupted_selector_fails_certificate() {
        let f = system(vec![
            vec![c(0.5), c(0.0)],
            vec![c(0.0), c(0.5)],
            vec![c(0.5), c(0.0)],
            vec![c(0.0), c(0.5)],
        ]);
        let p = CellPartition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let mut res =
            find_selector(&f, &p, Strategy::Greedy, &SelectorOptions::default()).unwrap();
        res.selected = vec![res.selected[0], res.selected[0]]; // two picks in one cell
        assert!(matches!(
            verify_selector_bound(&f, &p, &res),
            Err(FrameError::CertificateFailure(_))
        ));
    }

    #[test]
    fn greedy_never_beats_exhaustive() {
        // Small deterministic instance.
        let f = system(vec![
            vec![c(0.6), c(0.0)],
            vec![c(0.0), c(0.6)],
            vec![c(0.6), c(0.1)],
            vec![c(0.1), c(0.6)],
        ]);
        let p = CellPartition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let opts = SelectorOptions::default();
        let ex = find_selector(&f, &p, Strategy::Exhaustive, &opts).unwrap();
        let gr = find_selector(&f, &p, Strategy::Greedy, &opts).unwrap();
        let rd = find_selector(&f, &p, Strategy::Randomized, &opts).unwrap();
        assert!(gr.achieved_bessel >= ex.achieved_bessel - 1e-12);
        assert!(rd.achieved_bessel >= ex.achieved_bessel - 1e-12);
    }

    #[test]
    fn budget_exceeded() {
        let vectors = vec![vec![c(0.1), c(0.0)]; 8];
        let f = system(vectors);
        let p = CellPartition::new(vec![
            vec![0, 1],
            vec![2, 3],
            vec![4, 5],
            vec![6, 7],
        ])
        .unwrap();
        let opts = SelectorOptions { budget: 4, ..Default::default() };
        assert!(matches!(
            find_selector(&f, &p, Strategy::Exhaustive, &opts),
            Err(FrameError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn randomized_is_deterministic_for_fixed_seed() {
        let f = system(vec![
            vec![c(0.5), c(0.1)],
            vec![c(0.1), c(0.5)],
            vec![c(0.4), c(0.2)],
            vec![c(0.2), c(0.4)],
        ]);
        let p = CellPartition::new(vec![vec![0, 1], vec![2, 3]]).unwrap();
        let opts = SelectorOptions { seed: 42, restarts: 8, ..Default::default() };
        let a = find_selector(&f, &p, Strategy::Randomized, &opts).unwrap();
        let b = find_selector(&f, &p, Strategy::Randomized, &opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_non_bessel_input() {
        let vectors = vec![vec![c(2.0), c(0.0)]; 2];
        let f = system(vectors);
        let p = CellPartition::new(vec![vec![0, 1]]).unwrap();
        assert!(matches!(
            find_selector(&f, &p, Strategy::Greedy, &SelectorOptions::default()),
            Err(FrameError::InvalidInput(_))
        ));
    }
}
