//! Concrete frame families: exponentials on finite unions of intervals,
//! finite cyclic Gabor systems with a periodized-Gaussian default window,
//! and grid-sampled Paley-Wiener reproducing kernels.
//!
//! Continuous L^2 inner products are modeled by uniform grids with sqrt-step
//! weights, so the discrete inner product is a quadrature of the continuous
//! one. Aliased configurations are refused rather than silently accepted.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{FrameError, Result};
use crate::frame::FrameSystem;
use crate::geometry::{KernelDiagonal, Point, PointGeometry};
use crate::linalg;
#[allow(unused_imports)]
use num_traits::Float;

const TWO_PI: f64 = 2.0 * core::f64::consts::PI;

/// A finite union of disjoint intervals `[a_i, b_i)` with a grid step used
/// to discretize it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub intervals: Vec<(f64, f64)>,
    pub grid_step: f64,
}

impl SpectrumSpec {
    pub fn new(mut intervals: Vec<(f64, f64)>, grid_step: f64) -> Result<Self> {
        if intervals.is_empty() {
            return Err(FrameError::InvalidInput("spectrum needs at least one interval".into()));
        }
        if !(grid_step > 0.0) {
            return Err(FrameError::InvalidInput("grid step must be positive".into()));
        }
        intervals.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for &(a, b) in &intervals {
            if !(b > a) {
                return Err(FrameError::InvalidInput(format!("empty interval [{a}, {b})")));
            }
            let len = b - a;
            let steps = len / grid_step;
            if (steps - steps.round()).abs() > 1e-12 * steps.max(1.0) {
                return Err(FrameError::InvalidInput(format!(
                    "grid step {grid_step} does not divide interval length {len}"
                )));
            }
        }
        for w in intervals.windows(2) {
            if w[1].0 < w[0].1 - 1e-12 {
                return Err(FrameError::InvalidInput("spectrum intervals must be disjoint".into()));
            }
        }
        Ok(SpectrumSpec { intervals, grid_step })
    }

    /// Total measure of the spectrum.
    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Left-endpoint grid points of all intervals.
    pub fn grid(&self) -> Vec<f64> {
        let h = self.grid_step;
        let mut pts = Vec::new();
        for &(a, b) in &self.intervals {
            let m = ((b - a) / h).round() as usize;
            for j in 0..m {
                pts.push(a + j as f64 * h);
            }
        }
        pts
    }

    pub fn max_abs_frequency(&self) -> f64 {
        self.intervals
            .iter()
            .flat_map(|&(a, b)| [a.abs(), b.abs()])
            .fold(0.0_f64, f64::max)
    }
}

fn line_geometry_for(lambdas: &[f64], kernel_diag: f64) -> Result<PointGeometry> {
    let lo = lambdas.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = lambdas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (hi - lo).max(1.0);
    Ok(PointGeometry::line(lo, span)?
        .with_kernel_diagonal(KernelDiagonal::Constant(kernel_diag)))
}

/// Exponentials `sqrt(h) e^{2 pi i lambda t}` sampled on the spectrum grid.
/// Each vector has squared norm equal to the spectrum measure.
pub fn exponential_system(spec: &SpectrumSpec, lambdas: &[f64]) -> Result<FrameSystem> {
    if lambdas.is_empty() {
        return Err(FrameError::InvalidInput("empty frequency set".into()));
    }
    let max_lam = lambdas.iter().cloned().fold(0.0_f64, |m, l| m.max(l.abs()));
    if spec.grid_step * max_lam >= 0.5 {
        return Err(FrameError::InvalidInput(format!(
            "grid step {} too coarse for max |lambda| = {max_lam} (aliasing)",
            spec.grid_step
        )));
    }
    let grid = spec.grid();
    let sqrt_h = spec.grid_step.sqrt();
    let vectors: Vec<Vec<Complex64>> = lambdas
        .iter()
        .map(|&lam| {
            grid.iter()
                .map(|&t| Complex64::from_polar(sqrt_h, TWO_PI * lam * t))
                .collect()
        })
        .collect();
    let geometry = line_geometry_for(lambdas, spec.total_length())?;
    let points: Vec<Point> = lambdas.iter().map(|&l| vec![l]).collect();
    FrameSystem::new(grid.len(), vectors, points, geometry, None)
}

/// A finite Gabor family over `Z_N x Z_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborSpec {
    pub modulus: usize,
    pub window: Vec<Complex64>,
    pub index_set: Vec<(usize, usize)>,
}

impl GaborSpec {
    /// Unit-normalized periodized Gaussian window over `Z_N` and the full
    /// index set `Z_N x Z_N`.
    pub fn gaussian_full(modulus: usize) -> Result<Self> {
        let window = periodized_gaussian(modulus)?;
        Ok(GaborSpec { modulus, window, index_set: full_index_set(modulus) })
    }

    pub fn new(modulus: usize, window: Vec<Complex64>, index_set: Vec<(usize, usize)>) -> Result<Self> {
        if modulus < 2 {
            return Err(FrameError::InvalidInput("modulus must be >= 2".into()));
        }
        if window.len() != modulus {
            return Err(FrameError::InvalidInput("window length must equal the modulus".into()));
        }
        if index_set.is_empty() {
            return Err(FrameError::InvalidInput("index set must be nonempty".into()));
        }
        let mut seen = index_set.clone();
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(FrameError::InvalidInput("index set has duplicates".into()));
        }
        if index_set.iter().any(|&(a, b)| a >= modulus || b >= modulus) {
            return Err(FrameError::InvalidInput("index outside Z_N x Z_N".into()));
        }
        let window = normalize(window)?;
        Ok(GaborSpec { modulus, window, index_set })
    }
}

pub fn full_index_set(modulus: usize) -> Vec<(usize, usize)> {
    let mut set = Vec::with_capacity(modulus * modulus);
    for a in 0..modulus {
        for b in 0..modulus {
            set.push((a, b));
        }
    }
    set
}

/// Lattice `a Z_N x b Z_N`; `a` and `b` must divide `N`.
pub fn lattice_index_set(modulus: usize, a: usize, b: usize) -> Result<Vec<(usize, usize)>> {
    if a == 0 || b == 0 || modulus % a != 0 || modulus % b != 0 {
        return Err(FrameError::InvalidInput(format!(
            "lattice steps ({a}, {b}) must divide the modulus {modulus}"
        )));
    }
    let mut set = Vec::new();
    let mut x = 0;
    while x < modulus {
        let mut y = 0;
        while y < modulus {
            set.push((x, y));
            y += b;
        }
        x += a;
    }
    Ok(set)
}

/// `g[t] = sum_k exp(-pi (t + kN)^2 / N)`, unit-normalized.
pub fn periodized_gaussian(modulus: usize) -> Result<Vec<Complex64>> {
    if modulus < 2 {
        return Err(FrameError::InvalidInput("modulus must be >= 2".into()));
    }
    let n = modulus as f64;
    let window: Vec<Complex64> = (0..modulus)
        .map(|t| {
            let mut sum = 0.0;
            for k in -8i64..=8 {
                let u = t as f64 + k as f64 * n;
                sum += (-core::f64::consts::PI * u * u / n).exp();
            }
            Complex64::new(sum, 0.0)
        })
        .collect();
    normalize(window)
}

fn normalize(v: Vec<Complex64>) -> Result<Vec<Complex64>> {
    let norm = linalg::norm_sqr(&v).sqrt();
    if !(norm > 0.0) {
        return Err(FrameError::InvalidInput("window must be nonzero".into()));
    }
    Ok(v.into_iter().map(|z| z / norm).collect())
}

/// Time-frequency shift `(pi(a, b) g)[t] = e^{2 pi i b t / N} g[(t - a) mod N]`.
pub fn time_frequency_shift(window: &[Complex64], a: usize, b: usize) -> Vec<Complex64> {
    let n = window.len();
    (0..n)
        .map(|t| {
            let phase = Complex64::from_polar(1.0, TWO_PI * (b * t) as f64 / n as f64);
            phase * window[(t + n - a % n) % n]
        })
        .collect()
}

/// One vector `pi(a, b) g` per index; index points live on the cyclic torus
/// with weight `1/N` per group element and unit kernel diagonal.
pub fn gabor_system(spec: &GaborSpec) -> Result<FrameSystem> {
    let n = spec.modulus;
    let window = normalize(spec.window.clone())?;
    let vectors: Vec<Vec<Complex64>> = spec
        .index_set
        .iter()
        .map(|&(a, b)| time_frequency_shift(&window, a, b))
        .collect();
    let points: Vec<Point> = spec.index_set.iter().map(|&(a, b)| vec![a as f64, b as f64]).collect();
    let geometry =
        PointGeometry::cyclic_torus(n)?.with_kernel_diagonal(KernelDiagonal::Constant(1.0));
    FrameSystem::new(n, vectors, points, geometry, None)
}

/// Time grid for sampled Paley-Wiener kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    /// Symmetric extent: samples cover `[-extent/2, extent/2)`.
    pub extent: f64,
    pub step: f64,
}

#[derive(Debug, Clone)]
pub struct PwKernelSystem {
    pub system: FrameSystem,
    /// Max over kernels of the relative squared-norm deficit against the
    /// spectrum measure; truncation of the time window is never silent.
    pub max_tail_energy: f64,
    pub truncation_warning: bool,
}

const PW_TAIL_THRESHOLD: f64 = 1e-3;

/// Band-limited reproducing kernel at zero offset, `integral of 1 over Omega`.
pub fn pw_kernel_value(spec: &SpectrumSpec, u: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, b) in &spec.intervals {
        if u.abs() < 1e-12 {
            acc += Complex64::new(b - a, 0.0);
        } else {
            let ea = Complex64::from_polar(1.0, TWO_PI * a * u);
            let eb = Complex64::from_polar(1.0, TWO_PI * b * u);
            acc += (eb - ea) / Complex64::new(0.0, TWO_PI * u);
        }
    }
    acc
}

/// Grid samples of the kernels `k_lambda(y) = (F^-1 1_Omega)(y - lambda)`,
/// scaled by `sqrt(step)`. Sampling at or above the Nyquist rate keeps the
/// discrete inner products exact up to time-window truncation, which is
/// reported as a tail-energy diagnostic.
pub fn pw_kernel_system(
    spec: &SpectrumSpec,
    lambdas: &[f64],
    grid: TimeGrid,
) -> Result<PwKernelSystem> {
    if lambdas.is_empty() {
        return Err(FrameError::InvalidInput("empty sampling set".into()));
    }
    if !(grid.extent > 0.0 && grid.step > 0.0) {
        return Err(FrameError::InvalidInput("time grid extent and step must be positive".into()));
    }
    if spec.max_abs_frequency() > 0.5 / grid.step + 1e-12 {
        return Err(FrameError::InvalidInput(format!(
            "time step {} undersamples the spectrum (max frequency {})",
            grid.step,
            spec.max_abs_frequency()
        )));
    }
    let m = (grid.extent / grid.step).round() as usize;
    let sqrt_tau = grid.step.sqrt();
    let times: Vec<f64> = (0..m).map(|j| -grid.extent / 2.0 + j as f64 * grid.step).collect();
    let omega = spec.total_length();
    let mut max_tail: f64 = 0.0;
    let vectors: Vec<Vec<Complex64>> = lambdas
        .iter()
        .map(|&lam| {
            let v: Vec<Complex64> = times
                .iter()
                .map(|&y| pw_kernel_value(spec, y - lam) * sqrt_tau)
                .collect();
            let tail = (omega - linalg::norm_sqr(&v)) / omega;
            max_tail = max_tail.max(tail);
            v
        })
        .collect();
    let geometry = line_geometry_for(lambdas, omega)?;
    let points: Vec<Point> = lambdas.iter().map(|&l| vec![l]).collect();
    let system = FrameSystem::new(m, vectors, points, geometry, None)?;
    Ok(PwKernelSystem {
        system,
        max_tail_energy: max_tail,
        truncation_warning: max_tail > PW_TAIL_THRESHOLD,
    })
}

/// One tail-energy value per probe and radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationRow {
    pub probe_index: usize,
    pub radius: f64,
    pub tail_energy: f64,
}

/// Tail-energy profile `sum over far indices of |<g_lambda, k_x>|^2` as a
/// function of the radius; the finite stand-in for the homogeneous
/// approximation property.
pub fn localization_profile(
    f: &FrameSystem,
    probes: &FrameSystem,
    radii: &[f64],
) -> Result<Vec<LocalizationRow>> {
    if f.ambient_dim() != probes.ambient_dim() {
        return Err(FrameError::InvalidInput("probe vectors live in a different space".into()));
    }
    if f.geometry().kind != probes.geometry().kind {
        return Err(FrameError::InvalidInput("probe geometry does not match the system".into()));
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FrameError::InvalidInput("radii must be nonempty and increasing".into()));
    }
    let geom = f.geometry();
    let mut rows = Vec::with_capacity(probes.len() * radii.len());
    for pi in 0..probes.len() {
        let kx = probes.vector(pi);
        let x = &probes.index_points()[pi];
        let energies: Vec<(f64, f64)> = (0..f.len())
            .map(|li| {
                let d = geom.distance(&f.index_points()[li], x);
                (d, linalg::inner_product(f.vector(li), kx).norm_sqr())
            })
            .collect();
        // Tail over the complement of the closed ball, so at the diameter
        // the tail is exactly zero.
        for &r in radii {
            let tail: f64 = energies.iter().filter(|(d, _)| *d > r).map(|(_, e)| e).sum();
            rows.push(LocalizationRow { probe_index: pi, radius: r, tail_energy: tail });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::{diagonal_coefficients, frame_bounds, frame_operator};

    #[test]
    fn exponential_integer_frequencies_are_orthonormal() {
        let spec = SpectrumSpec::new(vec![(0.0, 1.0)], 1.0 / 64.0).unwrap();
        let lambdas: Vec<f64> = (-16..=16).map(|k| k as f64).collect();
        let f = exponential_system(&spec, &lambdas).unwrap();
        assert_eq!(f.ambient_dim(), 64);
        for v in f.vectors() {
            assert!((linalg::norm_sqr(v) - 1.0).abs() < 1e-10);
        }
        let b = frame_bounds(&f).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-10);
        assert!((b.upper - 1.0).abs() < 1e-10);
        assert_eq!(b.rank, 33);
    }

    #[test]
    fn exponential_nyquist_guard() {
        let spec = SpectrumSpec::new(vec![(0.0, 1.0)], 1.0 / 16.0).unwrap();
        let err = exponential_system(&spec, &[20.0]);
        assert!(matches!(err, Err(FrameError::InvalidInput(_))));
    }

    #[test]
    fn full_gabor_operator_is_n_identity() {
        for n in [4usize, 8] {
            let spec = GaborSpec::gaussian_full(n).unwrap();
            let f = gabor_system(&spec).unwrap();
            let s = frame_operator(&f).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let expect = if i == j { n as f64 } else { 0.0 };
                    assert!(
                        (s.matrix[(i, j)] - Complex64::new(expect, 0.0)).norm() < 1e-10,
                        "N = {n}, entry ({i}, {j})"
                    );
                }
            }
            let b = frame_bounds(&f).unwrap();
            assert!((b.lower - n as f64).abs() < 1e-10);
            assert!((b.upper - n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn full_gabor_diagonal_coefficients() {
        let n = 8;
        let spec = GaborSpec::gaussian_full(n).unwrap();
        let f = gabor_system(&spec).unwrap();
        let d = diagonal_coefficients(&f).unwrap();
        for &x in &d {
            assert!((x - 1.0 / n as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn lattice_gabor_constant_diagonal() {
        // a b | N -> d_lambda = ab/N by translation commutation.
        let n = 8;
        let spec = GaborSpec::new(n, periodized_gaussian(n).unwrap(), lattice_index_set(n, 2, 2).unwrap())
            .unwrap();
        let f = gabor_system(&spec).unwrap();
        let d = diagonal_coefficients(&f).unwrap();
        for &x in &d {
            assert!((x - 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn singleton_gabor_index() {
        let n = 6;
        let spec =
            GaborSpec::new(n, periodized_gaussian(n).unwrap(), vec![(0, 0)]).unwrap();
        let f = gabor_system(&spec).unwrap();
        let b = frame_bounds(&f).unwrap();
        assert_eq!(b.rank, 1);
        assert!((b.lower - 1.0).abs() < 1e-12);
        assert!((b.upper - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pw_kernel_is_sinc() {
        let spec = SpectrumSpec::new(vec![(-0.5, 0.5)], 1.0 / 64.0).unwrap();
        // k_0(0) = |Omega|.
        assert!((pw_kernel_value(&spec, 0.0).re - 1.0).abs() < 1e-12);
        // sinc at half-integer.
        let v = pw_kernel_value(&spec, 0.5);
        let expect = (core::f64::consts::PI * 0.5).sin() / (core::f64::consts::PI * 0.5);
        assert!((v.re - expect).abs() < 1e-12);
    }

    #[test]
    fn pw_kernels_integer_lattice_nearly_orthogonal() {
        let spec = SpectrumSpec::new(vec![(-0.5, 0.5)], 1.0 / 64.0).unwrap();
        let sys = pw_kernel_system(&spec, &[0.0, 1.0], TimeGrid { extent: 256.0, step: 0.5 })
            .unwrap();
        assert!(!sys.truncation_warning, "tail {}", sys.max_tail_energy);
        let ip = linalg::inner_product(sys.system.vector(0), sys.system.vector(1));
        assert!(ip.norm() < 1e-2);
        assert!((linalg::norm_sqr(sys.system.vector(0)) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn pw_exponential_duality() {
        let spec = SpectrumSpec::new(vec![(-0.5, 0.5)], 1.0 / 64.0).unwrap();
        let lambdas: Vec<f64> = (-8..8).map(|k| k as f64 / 2.0).collect();
        let exp = exponential_system(&spec, &lambdas).unwrap();
        let pw = pw_kernel_system(&spec, &lambdas, TimeGrid { extent: 512.0, step: 0.5 }).unwrap();
        let be = frame_bounds(&exp).unwrap();
        let bp = frame_bounds(&pw.system).unwrap();
        let tol = (pw.max_tail_energy.max(1e-6)).sqrt() * 10.0;
        assert!((be.upper - bp.upper).abs() < tol.max(0.05), "{} vs {}", be.upper, bp.upper);
    }

    #[test]
    fn localization_tail_zero_beyond_diameter() {
        let spec = GaborSpec::gaussian_full(8).unwrap();
        let f = gabor_system(&spec).unwrap();
        let probes = f.subset(&[0]).unwrap();
        let rows = localization_profile(&f, &probes, &[2.0, 100.0]).unwrap();
        assert_eq!(rows.last().unwrap().tail_energy, 0.0);
        // Monotone nonincreasing.
        assert!(rows[0].tail_energy >= rows[1].tail_energy);
    }

    #[test]
    fn localization_orthonormal_probe() {
        use num_complex::Complex64 as C;
        let dim = 4;
        let geom = PointGeometry::line(0.0, dim as f64).unwrap();
        let vectors: Vec<Vec<C>> = (0..dim)
            .map(|i| (0..dim).map(|j| C::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        let points: Vec<Point> = (0..dim).map(|i| vec![i as f64]).collect();
        let f = FrameSystem::new(dim, vectors, points, geom, None).unwrap();
        let probes = f.subset(&[1]).unwrap();
        let rows = localization_profile(&f, &probes, &[0.5]).unwrap();
        assert!(rows[0].tail_energy < 1e-15);
    }
}
