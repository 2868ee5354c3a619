//! Randomized structural checks against independent oracles: operator
//! identities, spectral monotonicity under vector removal, and density
//! estimator invariances under torus translation.

use framekit_core::{
    alpha_set, beurling_density, bessel_bound, canonical_dual, diagonal_coefficients,
    find_selector, frame_bounds, gabor_system, parseval_transform, theorem_bound,
    time_frequency_shift, CellPartition, FrameSystem, GaborSpec, KernelDiagonal, Point,
    PointGeometry, SelectorOptions, Strategy, WindowFamily,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_system(seed: u64, dim: usize, count: usize) -> FrameSystem {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut vectors = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        vectors.push(v);
        points.push(vec![i as f64 + rng.gen_range(-0.3..0.3)]);
    }
    let geom = PointGeometry::line(-1.0, count as f64 + 1.0)
        .unwrap()
        .with_kernel_diagonal(KernelDiagonal::Constant(1.0));
    FrameSystem::new(dim, vectors, points, geom, None).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // trace(S) equals the sum of squared norms, and also the sum of the
    // spectrum; the diagonal coefficients sum to the rank.
    #[test]
    fn trace_identities(seed in 0u64..1000, dim in 2usize..5, extra in 0usize..6) {
        let count = dim + extra;
        let f = random_system(seed, dim, count);
        let norms: f64 = (0..count)
            .map(|i| f.vector(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        let bounds = frame_bounds(&f).unwrap();
        prop_assert!(bounds.rank <= dim.min(count));
        let coeffs = diagonal_coefficients(&f).unwrap();
        let trace: f64 = coeffs.iter().sum();
        prop_assert!((trace - bounds.rank as f64).abs() < 1e-8);
        prop_assert!(coeffs.iter().all(|&d| (-1e-10..=1.0 + 1e-10).contains(&d)));
        prop_assert!(norms >= bounds.upper - 1e-8);
    }

    // The canonical dual's bounds are the reciprocals of the original's.
    #[test]
    fn dual_reciprocity(seed in 0u64..1000, dim in 2usize..5) {
        let f = random_system(seed, dim, dim + 2);
        let b = frame_bounds(&f).unwrap();
        let bd = frame_bounds(&canonical_dual(&f).unwrap()).unwrap();
        prop_assert_eq!(b.rank, bd.rank);
        prop_assert!((bd.lower - 1.0 / b.upper).abs() < 1e-7 * (1.0 / b.upper));
        prop_assert!((bd.upper - 1.0 / b.lower).abs() < 1e-7 * (1.0 / b.lower));
    }

    // The Parseval transform is a Parseval frame on its span and is a
    // fixed point of itself.
    #[test]
    fn parseval_idempotent(seed in 0u64..1000, dim in 2usize..5) {
        let f = random_system(seed, dim, dim + 2);
        let p = parseval_transform(&f).unwrap();
        let b = frame_bounds(&p).unwrap();
        prop_assert!((b.lower - 1.0).abs() < 1e-8);
        prop_assert!((b.upper - 1.0).abs() < 1e-8);
        let p2 = parseval_transform(&p).unwrap();
        for i in 0..p.len() {
            for (a, b) in p.vector(i).iter().zip(p2.vector(i)) {
                prop_assert!((a - b).norm() < 1e-8);
            }
        }
    }

    // Removing a vector can only shrink the spectrum: the upper bound is
    // non-increasing and, while the rank survives, so is the lower bound's
    // headroom (Cauchy interlacing).
    #[test]
    fn removal_monotonicity(seed in 0u64..1000, dim in 2usize..5, drop in 0usize..4) {
        let count = dim + 4;
        let f = random_system(seed, dim, count);
        let b_full = frame_bounds(&f).unwrap();
        let keep: Vec<usize> = (0..count).filter(|&i| i != drop).collect();
        let g = f.subset(&keep).unwrap();
        let b_sub = frame_bounds(&g).unwrap();
        prop_assert!(b_sub.upper <= b_full.upper + 1e-9);
        if b_sub.rank == b_full.rank {
            prop_assert!(b_sub.lower <= b_full.lower + 1e-9);
        }
    }

    // Bessel bound of a union is at most the sum of the parts' bounds and
    // at least their max.
    #[test]
    fn bessel_subadditive(seed in 0u64..1000, dim in 2usize..4) {
        let f = random_system(seed, dim, 2 * dim);
        let left: Vec<usize> = (0..dim).collect();
        let right: Vec<usize> = (dim..2 * dim).collect();
        let bl = bessel_bound(&f.subset(&left).unwrap()).unwrap();
        let br = bessel_bound(&f.subset(&right).unwrap()).unwrap();
        let b = bessel_bound(&f).unwrap();
        prop_assert!(b <= bl + br + 1e-9);
        prop_assert!(b >= bl.max(br) - 1e-9);
    }

    // Counting densities: removing points can only lower D-, and D- <= D+.
    #[test]
    fn density_monotone(seed in 0u64..1000, n in 8usize..20) {
        let mut rng = StdRng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..n).map(|k| vec![k as f64]).collect();
        let keep: Vec<Point> = pts
            .iter()
            .filter(|_| rng.gen_bool(0.7))
            .cloned()
            .collect();
        prop_assume!(!keep.is_empty());
        let g = PointGeometry::euclidean_box(vec![0.0], vec![n as f64], true).unwrap();
        let w = WindowFamily::grid(&g, vec![n as f64 / 4.0, n as f64 / 2.0]).unwrap();
        let full = beurling_density(&pts, &g, &w).unwrap();
        let part = beurling_density(&keep, &g, &w).unwrap();
        prop_assert!(full.d_minus <= full.d_plus + 1e-12);
        prop_assert!(part.d_minus <= full.d_minus + 1e-12);
        prop_assert!(part.d_plus <= full.d_plus + 1e-12);
    }

    // Translating every point by the same group element leaves the torus
    // density estimates unchanged.
    #[test]
    fn torus_translation_invariance(n in 4usize..9, shift_a in 0usize..8, shift_b in 0usize..8) {
        let g = PointGeometry::cyclic_torus(n).unwrap();
        let pts: Vec<Point> = (0..n)
            .flat_map(|a| (0..n).filter(move |b| (a + b) % 3 != 0).map(move |b| vec![a as f64, b as f64]))
            .collect();
        prop_assume!(!pts.is_empty());
        let shifted: Vec<Point> = pts
            .iter()
            .map(|p| {
                vec![
                    ((p[0] as usize + shift_a) % n) as f64,
                    ((p[1] as usize + shift_b) % n) as f64,
                ]
            })
            .collect();
        let w = WindowFamily::grid(&g, vec![n as f64 / 2.0 + 0.6]).unwrap();
        let d0 = beurling_density(&pts, &g, &w).unwrap();
        let d1 = beurling_density(&shifted, &g, &w).unwrap();
        prop_assert!((d0.d0_minus - d1.d0_minus).abs() < 1e-10);
        prop_assert!((d0.d0_plus - d1.d0_plus).abs() < 1e-10);
    }

    // Greedy and randomized search never beat the exhaustive oracle.
    #[test]
    fn selector_oracle_dominates(seed in 0u64..500) {
        let mut rng = StdRng::seed_from_u64(seed);
        let dim = 3;
        let count = 6;
        let scale = 1.0 / (3.0 * count as f64).sqrt();
        let mut vectors = Vec::new();
        let mut points = Vec::new();
        for i in 0..count {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
                .collect();
            vectors.push(v);
            points.push(vec![i as f64]);
        }
        let geom = PointGeometry::line(-1.0, count as f64).unwrap();
        let f = FrameSystem::new(dim, vectors, points, geom, None).unwrap();
        prop_assume!(bessel_bound(&f).unwrap() <= 1.0);
        let p = CellPartition::new(vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let opts = SelectorOptions { seed, ..Default::default() };
        let exact = find_selector(&f, &p, Strategy::Exhaustive, &opts).unwrap();
        let greedy = find_selector(&f, &p, Strategy::Greedy, &opts).unwrap();
        let random = find_selector(&f, &p, Strategy::Randomized, &opts).unwrap();
        prop_assert!(exact.achieved_bessel <= greedy.achieved_bessel + 1e-12);
        prop_assert!(exact.achieved_bessel <= random.achieved_bessel + 1e-12);
    }
}

// Shifting the Gabor window before generating matches relabelling the
// index set: the frame operator and its bounds are shift-covariant.
#[test]
fn gabor_covariance() {
    let n = 6;
    let spec = GaborSpec::gaussian_full(n).unwrap();
    let b0 = frame_bounds(&gabor_system(&spec).unwrap()).unwrap();
    for (a, b) in [(1, 0), (0, 2), (3, 4)] {
        let shifted = time_frequency_shift(&spec.window, a, b);
        let spec2 = GaborSpec::new(n, shifted, framekit_core::full_index_set(n)).unwrap();
        let b1 = frame_bounds(&gabor_system(&spec2).unwrap()).unwrap();
        assert!((b0.lower - b1.lower).abs() < 1e-8);
        assert!((b0.upper - b1.upper).abs() < 1e-8);
    }
}

// The theorem bound is monotone: larger cells or smaller norms help.
#[test]
fn theorem_bound_monotone() {
    for r in 1..50usize {
        assert!(theorem_bound(r + 1, 0.5) < theorem_bound(r, 0.5));
    }
    for k in 1..20 {
        let a0 = k as f64 / 21.0;
        let a1 = (k + 1) as f64 / 21.0;
        assert!(theorem_bound(10, a0) < theorem_bound(10, a1));
    }
}

// A full Gabor system thinned by alpha keeps every index at alpha >= 1/N
// and drops all of them just below.
#[test]
fn alpha_set_threshold_is_inclusive() {
    let n = 5;
    let f = gabor_system(&GaborSpec::gaussian_full(n).unwrap()).unwrap();
    assert_eq!(alpha_set(&f, 1.0 / n as f64 + 1e-9).unwrap().len(), n * n);
    assert!(alpha_set(&f, 1.0 / n as f64 - 1e-6).unwrap().is_empty());
}
