//! Seeded random system generators. All draws flow from one 64-bit seed
//! through fixed per-purpose stream ids, so adding parallelism elsewhere
//! cannot change what gets generated.

use framekit_core::{parseval_transform, FrameSystem, KernelDiagonal, PointGeometry};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const STREAM_SYSTEM: u64 = 0x01;
const STREAM_WINDOW: u64 = 0x02;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random complex system on a unit-density line with constant kernel.
pub fn random_system(seed: u64, dim: usize, count: usize) -> FrameSystem {
    let mut rng = rng_for(seed, STREAM_SYSTEM);
    let mut vectors = Vec::with_capacity(count);
    let mut points = Vec::with_capacity(count);
    for i in 0..count {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        vectors.push(v);
        points.push(vec![i as f64]);
    }
    let geometry = PointGeometry::line(-0.5, count as f64)
        .expect("line geometry")
        .with_kernel_diagonal(KernelDiagonal::Constant(1.0));
    FrameSystem::new(dim, vectors, points, geometry, None).expect("random system is valid")
}

/// Random Parseval frame: a random system pushed through its inverse
/// square-root frame operator. Retries with perturbed seeds on the
/// measure-zero event of a rank-deficient draw.
pub fn random_parseval(seed: u64, dim: usize, count: usize) -> FrameSystem {
    for attempt in 0..8 {
        let f = random_system(seed.wrapping_add(attempt << 56), dim, count);
        if let Ok(p) = parseval_transform(&f) {
            return p;
        }
    }
    panic!("could not draw a full-rank system for seed {seed}");
}

/// Random unit-norm window of length `n`.
pub fn random_unit_window(seed: u64, n: usize) -> Vec<Complex64> {
    let mut rng = rng_for(seed, STREAM_WINDOW);
    let mut w: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut w {
        *z /= norm;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use framekit_core::frame_bounds;

    #[test]
    fn parseval_is_parseval() {
        let p = random_parseval(3, 4, 9);
        let b = frame_bounds(&p).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-10);
        assert!((b.upper - 1.0).abs() < 1e-10);
    }

    #[test]
    fn same_seed_same_system() {
        let a = random_system(11, 3, 5);
        let b = random_system(11, 3, 5);
        assert_eq!(a.vectors(), b.vectors());
        let c = random_system(12, 3, 5);
        assert_ne!(a.vectors(), c.vectors());
    }

    #[test]
    fn unit_window_norm() {
        let w = random_unit_window(5, 16);
        let n: f64 = w.iter().map(|z| z.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
}
