//! Acceptance gate: one test per criterion, each printing a single
//! pass/fail line. Tolerances are pinned here and nowhere else.

use std::time::Instant;

use framekit::randgen::{random_parseval, random_system, random_unit_window};
use framekit::report::{SelectorOut, TraceOut};
use framekit_core::{
    beurling_density, check_near_critical_lemma, diagonal_coefficients, find_selector,
    frame_bounds, frame_measure, gabor_system, lattice_index_set, localization_profile,
    periodized_gaussian, thin_once, thin_to_density, verify_frd, verify_selector_bound,
    CellPartition, FrameSystem, GaborSpec, KernelDiagonal, Point, PointGeometry, SelectorOptions,
    StopReason, Strategy, ThinningConfig, WindowFamily,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id} ({name}): {status} {detail}");
    assert!(pass, "acceptance {id} ({name}) failed: {detail}");
}

fn doubled_onb(dim: usize) -> FrameSystem {
    let geometry = PointGeometry::euclidean_box(vec![0.0], vec![dim as f64], true)
        .unwrap()
        .with_kernel_diagonal(KernelDiagonal::Constant(1.0));
    let mut vectors = Vec::new();
    let mut points = Vec::new();
    for copy in 0..2 {
        for i in 0..dim {
            let mut v = vec![Complex64::new(0.0, 0.0); dim];
            v[i] = Complex64::new(1.0, 0.0);
            vectors.push(v);
            points.push(vec![i as f64 + 0.5 * copy as f64]);
        }
    }
    FrameSystem::new(dim, vectors, points, geometry, None).unwrap()
}

fn torus_windows(n: usize) -> WindowFamily {
    let g = PointGeometry::cyclic_torus(n).unwrap();
    WindowFamily::grid(&g, vec![n as f64 / 4.0, n as f64 / 2.0 + 0.6]).unwrap()
}

fn lattice_gabor(n: usize, a: usize, b: usize, seed: u64) -> FrameSystem {
    let window = random_unit_window(seed, n);
    let spec = GaborSpec::new(n, window, lattice_index_set(n, a, b).unwrap()).unwrap();
    gabor_system(&spec).unwrap()
}

// Criterion 1: the diagonal coefficients of 200 seeded random systems sum
// to the rank of the frame operator.
#[test]
fn acceptance_1_trace_identity() {
    let start = Instant::now();
    let mut meta = StdRng::seed_from_u64(0xacce5501);
    let mut worst: f64 = 0.0;
    for trial in 0..200u64 {
        let dim = meta.gen_range(2..=16);
        let count = meta.gen_range(dim..=64.max(dim));
        let f = random_system(trial, dim, count);
        let bounds = frame_bounds(&f).unwrap();
        let coeffs = diagonal_coefficients(&f).unwrap();
        let trace: f64 = coeffs.iter().sum();
        worst = worst.max((trace - bounds.rank as f64).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst < 1e-8 && elapsed.as_secs_f64() < 10.0;
    report(
        1,
        "trace identity",
        pass,
        &format!("max |trace - rank| = {worst:.2e} over 200 systems in {elapsed:.2?}"),
    );
}

// Criterion 2: lattice Gabor systems with random unit windows have exact
// constant measure ab/N and measure-density product 1.
#[test]
fn acceptance_2_exact_frd_lattice_gabor() {
    let start = Instant::now();
    let mut worst_measure: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    for &(n, a, b) in &[(8, 2, 2), (12, 2, 3), (16, 4, 2), (16, 2, 2)] {
        let expect = (a * b) as f64 / n as f64;
        for seed in 0..10u64 {
            let f = lattice_gabor(n, a, b, seed);
            let w = torus_windows(n);
            let m = frame_measure(&f, &w).unwrap();
            worst_measure = worst_measure
                .max((m.m_plus - expect).abs())
                .max((m.m_minus - expect).abs());
            let frd = verify_frd(&f, &w).unwrap();
            worst_product = worst_product.max(frd.max_deviation);
        }
    }
    let elapsed = start.elapsed();
    let pass = worst_measure < 1e-8 && worst_product < 1e-8 && elapsed.as_secs_f64() < 30.0;
    report(
        2,
        "exact measure-density product",
        pass,
        &format!(
            "measure dev {worst_measure:.2e}, product dev {worst_product:.2e} in {elapsed:.2?}"
        ),
    );
}

fn selector_trials() -> (Vec<SelectorOut>, f64, bool) {
    let partition =
        CellPartition::new((0..4).map(|k| (4 * k..4 * (k + 1)).collect()).collect()).unwrap();
    let mut outs = Vec::new();
    let mut worst_gap = f64::NEG_INFINITY;
    let mut all_ok = true;
    for seed in 0..100u64 {
        let f = random_parseval(seed, 8, 16);
        let opts = SelectorOptions { seed, ..Default::default() };
        let res = find_selector(&f, &partition, Strategy::Exhaustive, &opts).unwrap();
        all_ok &= res.certified && res.achieved_bessel <= res.theorem_bound;
        verify_selector_bound(&f, &partition, &res).unwrap();
        worst_gap = worst_gap.max(res.achieved_bessel - res.theorem_bound);
        outs.push(SelectorOut::from(&res));
    }
    (outs, worst_gap, all_ok)
}

// Criterion 3: the exhaustive selector beats the theorem bound on 100
// seeded random Parseval frames, and every run certifies.
#[test]
fn acceptance_3_selector_theorem() {
    let start = Instant::now();
    let (_, worst_gap, all_ok) = selector_trials();
    let elapsed = start.elapsed();
    let pass = all_ok && worst_gap <= 0.0 && elapsed.as_secs_f64() < 60.0;
    report(
        3,
        "selector theorem",
        pass,
        &format!("100/100 certified, worst achieved-bound gap {worst_gap:.3e} in {elapsed:.2?}"),
    );
}

fn one_pass_step() -> framekit_core::ThinStep {
    let f = doubled_onb(8);
    let active: Vec<usize> = (0..f.len()).collect();
    let config = ThinningConfig::new(1.0, 4.0).unwrap();
    thin_once(&f, &active, &config).unwrap()
}

// Criterion 4: one removal pass on the doubled orthonormal basis keeps a
// lower bound of at least A eps/(eps+4) and does not raise the upper.
#[test]
fn acceptance_4_one_pass_removal_bound() {
    let step = one_pass_step();
    let a_initial = 2.0;
    let b_initial = 2.0;
    let floor = a_initial / 5.0;
    let pass = step.new_bounds.lower >= floor - 1e-8 && step.new_bounds.upper <= b_initial + 1e-8;
    report(
        4,
        "one-pass removal bound",
        pass,
        &format!(
            "lower {} >= {floor}, upper {} <= {b_initial}",
            step.new_bounds.lower, step.new_bounds.upper
        ),
    );
}

fn thin_gabor(n: usize) -> framekit_core::ThinningTrace {
    let f = gabor_system(&GaborSpec::gaussian_full(n).unwrap()).unwrap();
    let mut config = ThinningConfig::new(1.0, n as f64 / 2.0 + 0.6).unwrap();
    config.r_override = Some(4);
    config.seed = 7;
    thin_to_density(&f, &config).unwrap()
}

// Criterion 5: end-to-end thinning of full Gabor systems lands in the
// near-critical band with a surviving frame.
#[test]
fn acceptance_5_end_to_end_thinning() {
    let start = Instant::now();
    let mut pass = true;
    let mut detail = String::new();
    for n in [8usize, 16] {
        let trace = thin_gabor(n);
        let decreasing = trace
            .iterations
            .windows(2)
            .all(|w| w[1].new_d0_plus < w[0].new_d0_plus);
        let ok = trace.stop_reason == StopReason::ReachedTarget
            && trace.final_bounds.lower > 0.0
            && trace.final_d0_minus <= 2.5
            && decreasing;
        pass &= ok;
        detail.push_str(&format!(
            "N={n}: D0-={:.3} lambda_min={:.3e} iters={} ",
            trace.final_d0_minus,
            trace.final_bounds.lower,
            trace.iterations.len()
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed.as_secs_f64() < 120.0;
    report(5, "end-to-end thinning", pass, &format!("{detail}in {elapsed:.2?}"));
}

// Criterion 6: the density estimator recovers 1/a for arithmetic
// progressions at radius 100.
#[test]
fn acceptance_6_density_convergence() {
    let mut worst: f64 = 0.0;
    for a in [1usize, 2, 4] {
        let points: Vec<Point> =
            (0..).map(|k| vec![(a * k) as f64]).take_while(|p| p[0] < 1000.0).collect();
        let g = PointGeometry::line(0.0, 1000.0).unwrap();
        let w = WindowFamily::grid(&g, vec![50.0, 100.0]).unwrap();
        let d = beurling_density(&points, &g, &w).unwrap();
        let expect = 1.0 / a as f64;
        worst = worst.max((d.d_minus - expect).abs()).max((d.d_plus - expect).abs());
    }
    report(6, "density estimator convergence", worst < 0.02, &format!("max error {worst:.4}"));
}

// Criterion 7: the sublevel-density inequality holds within the 10%
// finite-size band on all criterion-2 systems plus the doubled basis.
#[test]
fn acceptance_7_near_critical_lemma() {
    let alpha = 2.0 / 3.0;
    let mut pass = true;
    for &(n, a, b) in &[(8, 2, 2), (12, 2, 3), (16, 4, 2), (16, 2, 2)] {
        for seed in 0..10u64 {
            let f = lattice_gabor(n, a, b, seed);
            let rep = check_near_critical_lemma(&f, alpha, &torus_windows(n), 0.1).unwrap();
            pass &= rep.holds;
        }
    }
    let f = doubled_onb(8);
    let w = WindowFamily::grid(f.geometry(), vec![2.0, 4.0]).unwrap();
    let rep = check_near_critical_lemma(&f, alpha, &w, 0.1).unwrap();
    pass &= rep.holds;
    report(7, "near-critical sublevel density", pass, "41/41 systems within band");
}

// Criterion 8: Gaussian Gabor tail energies decay monotonically and
// vanish at half the group diameter.
#[test]
fn acceptance_8_localization_profiles() {
    let n = 16;
    let f = gabor_system(&GaborSpec::new(
        n,
        periodized_gaussian(n).unwrap(),
        framekit_core::full_index_set(n),
    )
    .unwrap())
    .unwrap();
    let probes = f.subset(&[0, 17, 100, 200, 255]).unwrap();
    let radii = vec![2.0, 4.0, 6.0, 8.0];
    let rows = localization_profile(&f, &probes, &radii).unwrap();
    let mut pass = true;
    let mut worst_tail: f64 = 0.0;
    for probe in 0..5 {
        let tails: Vec<f64> = rows
            .iter()
            .filter(|r| r.probe_index == probe)
            .map(|r| r.tail_energy)
            .collect();
        pass &= tails.windows(2).all(|w| w[1] <= w[0]);
        worst_tail = worst_tail.max(*tails.last().unwrap());
    }
    pass &= worst_tail < 1e-6;
    report(
        8,
        "localization profiles",
        pass,
        &format!("max tail at r = {} is {worst_tail:.2e}", n / 2),
    );
}

// Criterion 9: criteria 3-5 rerun with the same seeds give byte-identical
// JSON.
#[test]
fn acceptance_9_determinism() {
    let sel_a = serde_json::to_string(&selector_trials().0).unwrap();
    let sel_b = serde_json::to_string(&selector_trials().0).unwrap();
    let once_a = serde_json::to_string(&TraceOut::from(&trace_of_one_pass())).unwrap();
    let once_b = serde_json::to_string(&TraceOut::from(&trace_of_one_pass())).unwrap();
    let thin_a = serde_json::to_string(&TraceOut::from(&thin_gabor(8))).unwrap();
    let thin_b = serde_json::to_string(&TraceOut::from(&thin_gabor(8))).unwrap();
    let pass = sel_a == sel_b && once_a == once_b && thin_a == thin_b;
    report(9, "determinism", pass, "selector, one-pass, and thinning JSON byte-identical");
}

fn trace_of_one_pass() -> framekit_core::ThinningTrace {
    let f = doubled_onb(8);
    let mut config = ThinningConfig::new(1.0, 4.0).unwrap();
    config.max_iterations = 1;
    match thin_to_density(&f, &config) {
        Ok(trace) => trace,
        Err(framekit_core::ThinningError::Partial(trace)) => trace,
        Err(e) => panic!("{e:?}"),
    }
}
