//! Lattice-regularized complex Gaussian random field.
//!
//! On a Cartesian momentum grid with midpoints `k_i = −Λ + (j + ½)Δk`,
//! `Δk = 2Λ/n`, the field is
//!
//! `ξ(x) = Σ_k √w(k) e^{−i(k⁰t − k·r)} z_k`,  `w(k) = Δk³ / ((2π)³ 2k⁰)`,
//!
//! with independent circular complex normals `z_k` (`E|z|² = 1`,
//! `E z² = 0`). Its moments `E ξ(x₁)⋯ξ*(y_n)` are sums over `ξ–ξ*`
//! contractions of the lattice two-point function, the same combinatorics as
//! the complex free field.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::rng::{stream_rng, RunningStats};
use crate::spin::ComplexMatrix;
use crate::vacuum::wick::bipartite_sum;
use crate::vacuum::{proper_time_integral, w0_spacelike, MassParam, SpacetimePoint};
use crate::{Error, Result};

/// Stream pair used for field samples; sample `i` draws from block `i`.
const FIELD_STREAM: u32 = 0x00F1_E1D0;

/// Largest number of `ξ` (and of `ξ*`) factors in a moment check.
pub const MAX_MOMENT_ORDER: usize = 2;

/// Fewest samples accepted by [`verify_moment_identity`].
pub const MIN_MOMENT_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumLattice {
    cutoff: f64,
    n_per_axis: usize,
    mass: MassParam,
    regulator: Option<f64>,
    modes: Vec<[f64; 3]>,
    energies: Vec<f64>,
    weights: Vec<f64>,
}

impl MomentumLattice {
    /// Sharp cutoff `|k_i| ≤ Λ` with `n_per_axis³` modes.
    pub fn new(cutoff: f64, n_per_axis: usize, mass: MassParam) -> Result<Self> {
        Self::build(cutoff, n_per_axis, mass, None)
    }

    /// `Λ = 8m`, 48 modes per axis.
    pub fn default_for(mass: MassParam) -> Self {
        Self::new(8.0 * mass.value(), 48, mass).expect("default lattice is valid")
    }

    /// Same grid with every weight multiplied by `exp(−ρ²|k|²)`. The
    /// continuum limit is then the covariance of Gaussian smearings with
    /// `(σ_f² + σ_g²)/2 = ρ²`.
    pub fn with_gaussian_regulator(cutoff: f64, n_per_axis: usize, mass: MassParam, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::validation(format!("regulator width must be positive, got {rho}")));
        }
        Self::build(cutoff, n_per_axis, mass, Some(rho))
    }

    fn build(cutoff: f64, n: usize, mass: MassParam, regulator: Option<f64>) -> Result<Self> {
        if !(cutoff > 0.0) || !cutoff.is_finite() {
            return Err(Error::validation(format!("cutoff must be positive, got {cutoff}")));
        }
        if n < 8 || n % 2 == 1 {
            return Err(Error::validation(format!("n_per_axis must be even and ≥ 8, got {n}")));
        }
        let dk = 2.0 * cutoff / n as f64;
        let axis: Vec<f64> = (0..n).map(|j| -cutoff + (j as f64 + 0.5) * dk).collect();
        let m2 = mass.value() * mass.value();
        let scale = dk.powi(3) / (8.0 * PI.powi(3) * 2.0);
        let mut modes = Vec::with_capacity(n * n * n);
        let mut energies = Vec::with_capacity(n * n * n);
        let mut weights = Vec::with_capacity(n * n * n);
        for &kx in &axis {
            for &ky in &axis {
                for &kz in &axis {
                    let k2 = kx * kx + ky * ky + kz * kz;
                    let k0 = (k2 + m2).sqrt();
                    let damping = regulator.map_or(1.0, |r| (-r * r * k2).exp());
                    modes.push([kx, ky, kz]);
                    energies.push(k0);
                    weights.push(scale / k0 * damping);
                }
            }
        }
        Ok(MomentumLattice { cutoff, n_per_axis: n, mass, regulator, modes, energies, weights })
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }
    pub fn n_per_axis(&self) -> usize {
        self.n_per_axis
    }
    pub fn spacing(&self) -> f64 {
        2.0 * self.cutoff / self.n_per_axis as f64
    }
    pub fn mass(&self) -> MassParam {
        self.mass
    }
    pub fn regulator(&self) -> Option<f64> {
        self.regulator
    }
    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn phase(&self, k: usize, p: &SpacetimePoint) -> f64 {
        let q = &self.modes[k];
        self.energies[k] * p.t - (q[0] * p.r[0] + q[1] * p.r[1] + q[2] * p.r[2])
    }

    /// `√w(k) e^{−ikx}` for every mode.
    fn amplitudes(&self, p: &SpacetimePoint) -> Vec<Complex64> {
        (0..self.modes.len())
            .map(|k| Complex64::from_polar(self.weights[k].sqrt(), -self.phase(k, p)))
            .collect()
    }
}

/// Neumaier-compensated sum.
#[derive(Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Σ_k w(k) e^{−ik(x − y)}`, the exact lattice two-point function.
pub fn lattice_covariance(x: &SpacetimePoint, y: &SpacetimePoint, lattice: &MomentumLattice) -> Complex64 {
    let d = SpacetimePoint::new(x.t - y.t, std::array::from_fn(|k| x.r[k] - y.r[k]));
    let (mut re, mut im) = (Compensated::default(), Compensated::default());
    for k in 0..lattice.modes.len() {
        let (s, c) = lattice.phase(k, &d).sin_cos();
        re.add(lattice.weights[k] * c);
        im.add(-lattice.weights[k] * s);
    }
    Complex64::new(re.value(), im.value())
}

/// Lattice covariance over a point set.
pub fn lattice_covariance_matrix(points: &[SpacetimePoint], lattice: &MomentumLattice) -> Result<ComplexMatrix> {
    let n = points.len();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let w = lattice_covariance(&points[i], &points[j], lattice);
            data[i * n + j] = w;
            data[j * n + i] = w.conj();
        }
    }
    ComplexMatrix::from_rows(n, n, data)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample {
    pub points: Vec<SpacetimePoint>,
    pub values: Vec<Complex64>,
    pub seed: u64,
    pub index: u32,
}

fn draw_sample(amps: &[Vec<Complex64>], seed: u64, index: u32, rotation: Complex64) -> Vec<Complex64> {
    let modes = amps.first().map_or(0, |a| a.len());
    let mut rng = stream_rng(seed, FIELD_STREAM, index);
    let mut values = vec![Complex64::new(0.0, 0.0); amps.len()];
    for k in 0..modes {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let z = Complex64::new(re, im) * (std::f64::consts::FRAC_1_SQRT_2) * rotation;
        for (v, a) in values.iter_mut().zip(amps) {
            *v += a[k] * z;
        }
    }
    values
}

/// One field configuration evaluated at `points`.
pub fn sample_field(lattice: &MomentumLattice, points: &[SpacetimePoint], seed: u64) -> FieldSample {
    let amps: Vec<Vec<Complex64>> = points.iter().map(|p| lattice.amplitudes(p)).collect();
    FieldSample { points: points.to_vec(), values: draw_sample(&amps, seed, 0, Complex64::new(1.0, 0.0)), seed, index: 0 }
}

/// `n` independent configurations; sample `i` uses its own stream, so the
/// set is the same for any worker count.
pub fn sample_fields(lattice: &MomentumLattice, points: &[SpacetimePoint], n: usize, seed: u64) -> Result<Vec<FieldSample>> {
    sample_fields_with_phase(lattice, points, n, seed, 0.0)
}

/// [`sample_fields`] with every `z_k` multiplied by `e^{iθ}`.
pub fn sample_fields_with_phase(
    lattice: &MomentumLattice,
    points: &[SpacetimePoint],
    n: usize,
    seed: u64,
    theta: f64,
) -> Result<Vec<FieldSample>> {
    if n > u32::MAX as usize {
        return Err(Error::Capacity(format!("{n} samples exceed the stream layout")));
    }
    let amps: Vec<Vec<Complex64>> = points.iter().map(|p| lattice.amplitudes(p)).collect();
    let rotation = Complex64::from_polar(1.0, theta);
    Ok((0..n as u32)
        .into_par_iter()
        .map(|i| FieldSample { points: points.to_vec(), values: draw_sample(&amps, seed, i, rotation), seed, index: i })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub mean: Complex64,
    /// `√(Var Re + Var Im) / √n`.
    pub stderr: f64,
    pub n_samples: usize,
}

impl MomentEstimate {
    /// `|mean − target| / stderr`.
    pub fn z_score(&self, target: Complex64) -> f64 {
        (self.mean - target).norm() / self.stderr
    }
}

/// Empirical `E Π ξ(points[xs]) Π ξ*(points[ys])` over `samples`.
pub fn moment_from_samples(samples: &[FieldSample], xs: &[usize], ys: &[usize]) -> Result<MomentEstimate> {
    let (mut re, mut im) = (RunningStats::default(), RunningStats::default());
    for s in samples {
        let mut v = Complex64::new(1.0, 0.0);
        for &i in xs {
            v *= *s.values.get(i).ok_or(Error::IndexOutOfRange { index: i, len: s.values.len() })?;
        }
        for &j in ys {
            v *= s.values.get(j).ok_or(Error::IndexOutOfRange { index: j, len: s.values.len() })?.conj();
        }
        re.push(v.re);
        im.push(v.im);
    }
    let n = samples.len();
    let stderr = if n == 0 { 0.0 } else { ((re.variance() + im.variance()) / n as f64).sqrt() };
    Ok(MomentEstimate { mean: Complex64::new(re.mean, im.mean), stderr, n_samples: n })
}

/// Wick value of `⟨φ(x₁)⋯φ(x_p) φ*(y₁)⋯φ*(y_q)⟩` with the lattice two-point
/// function: the permanent of `W(x_i, y_j)` for `p = q`, zero otherwise.
pub fn analytic_moment(xs: &[SpacetimePoint], ys: &[SpacetimePoint], lattice: &MomentumLattice) -> Complex64 {
    if xs.len() != ys.len() {
        return Complex64::new(0.0, 0.0);
    }
    bipartite_sum(xs.len(), |i, j| lattice_covariance(&xs[i], &ys[j], lattice))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCheck {
    pub estimate: MomentEstimate,
    pub analytic: Complex64,
}

impl MomentCheck {
    pub fn within(&self, sigmas: f64) -> bool {
        (self.estimate.mean - self.analytic).norm() <= sigmas * self.estimate.stderr
    }
}

/// Classical moment `E ξ(x₁)⋯ξ*(y_q)` against the quantum Wick value.
pub fn verify_moment_identity(
    xs: &[SpacetimePoint],
    ys: &[SpacetimePoint],
    lattice: &MomentumLattice,
    n_samples: usize,
    seed: u64,
) -> Result<MomentCheck> {
    if xs.len() > MAX_MOMENT_ORDER || ys.len() > MAX_MOMENT_ORDER {
        return Err(Error::Capacity(format!(
            "moment with {} ξ and {} ξ* factors, at most {MAX_MOMENT_ORDER} of each",
            xs.len(),
            ys.len()
        )));
    }
    if n_samples < MIN_MOMENT_SAMPLES {
        return Err(Error::Domain { what: "n_samples", value: n_samples as f64, domain: "n_samples >= 10000" });
    }
    let points: Vec<SpacetimePoint> = xs.iter().chain(ys).copied().collect();
    let samples = sample_fields(lattice, &points, n_samples, seed)?;
    let xi: Vec<usize> = (0..xs.len()).collect();
    let yi: Vec<usize> = (xs.len()..points.len()).collect();
    Ok(MomentCheck {
        estimate: moment_from_samples(&samples, &xi, &yi)?,
        analytic: analytic_moment(xs, ys, lattice),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergencePoint {
    pub cutoff: f64,
    pub n_per_axis: usize,
    pub regulator: Option<f64>,
    pub lattice: f64,
    pub continuum: f64,
    pub deviation: f64,
    pub relative: f64,
}

/// Continuum target for a lattice: `W₀(s)` for the sharp cutoff, the
/// matching smeared covariance for a regulated one.
pub fn continuum_covariance(s: f64, lattice: &MomentumLattice) -> Result<f64> {
    match lattice.regulator {
        None => w0_spacelike(s, lattice.mass),
        Some(rho) => proper_time_integral(s, rho * rho, lattice.mass.value()),
    }
}

/// Lattice versus continuum two-point function at an equal-time pair.
pub fn cutoff_convergence_scan(
    x: &SpacetimePoint,
    y: &SpacetimePoint,
    lattices: &[MomentumLattice],
) -> Result<Vec<ConvergencePoint>> {
    if x.t != y.t {
        return Err(Error::validation("convergence scan needs an equal-time pair"));
    }
    let s = x.spatial_distance(y);
    if !(s > 0.0) {
        return Err(Error::Domain { what: "s", value: s, domain: "(0, ∞) (spacelike)" });
    }
    lattices
        .iter()
        .map(|lat| {
            let value = lattice_covariance(x, y, lat).re;
            let continuum = continuum_covariance(s, lat)?;
            let deviation = (value - continuum).abs();
            Ok(ConvergencePoint {
                cutoff: lat.cutoff,
                n_per_axis: lat.n_per_axis,
                regulator: lat.regulator,
                lattice: value,
                continuum,
                deviation,
                relative: deviation / continuum.abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> MomentumLattice {
        MomentumLattice::new(4.0, 8, MassParam::new(1.0).unwrap()).unwrap()
    }

    fn pts() -> Vec<SpacetimePoint> {
        vec![
            SpacetimePoint::at_rest([0.0; 3]),
            SpacetimePoint::at_rest([0.5, 0.0, 0.0]),
            SpacetimePoint::new(0.3, [0.0, 1.0, -0.5]),
        ]
    }

    #[test]
    fn lattice_validation_and_weights() {
        let m = MassParam::new(1.0).unwrap();
        assert!(MomentumLattice::new(4.0, 7, m).is_err());
        assert!(MomentumLattice::new(4.0, 6, m).is_err());
        assert!(MomentumLattice::new(0.0, 8, m).is_err());
        let lat = small();
        assert_eq!(lat.mode_count(), 512);
        assert!(lat.weights().iter().all(|w| *w > 0.0 && w.is_finite()));
    }

    #[test]
    fn covariance_structure() {
        let lat = small();
        let p = pts();
        let w = lattice_covariance(&p[0], &p[0], &lat);
        assert!(w.re > 0.0 && w.im.abs() < 1e-18);
        assert!((w.re - lat.weights().iter().sum::<f64>()).abs() < 1e-15);
        let a = lattice_covariance(&p[1], &p[2], &lat);
        let b = lattice_covariance(&p[2], &p[1], &lat);
        assert!((a - b.conj()).norm() < 1e-17);
        let eig = lattice_covariance_matrix(&p, &lat).unwrap().hermitian_eigenvalues().unwrap();
        assert!(eig.iter().all(|e| *e >= -1e-10));
    }

    #[test]
    fn sampling_is_deterministic() {
        let lat = small();
        let p = pts();
        assert_eq!(sample_field(&lat, &p, 9), sample_field(&lat, &p, 9));
        assert_ne!(sample_field(&lat, &p, 9).values, sample_field(&lat, &p, 10).values);
        let a = sample_fields(&lat, &p, 50, 4).unwrap();
        assert_eq!(a, sample_fields(&lat, &p, 50, 4).unwrap());
        assert_eq!(a[0].values, sample_field(&lat, &p, 4).values);
    }

    #[test]
    fn moment_checks_small_lattice() {
        let lat = small();
        let p = pts();
        let two = verify_moment_identity(&p[..1], &p[1..2], &lat, 10_000, 1).unwrap();
        assert!(two.within(5.0), "{two:?}");
        let none = verify_moment_identity(&p[..2], &[], &lat, 10_000, 2).unwrap();
        assert_eq!(none.analytic, Complex64::new(0.0, 0.0));
        assert!(none.within(5.0));
        let same = [p[0]; 2];
        let four = verify_moment_identity(&same, &same, &lat, 10_000, 3).unwrap();
        let w = lattice_covariance(&p[0], &p[0], &lat);
        assert!((four.analytic - 2.0 * w * w).norm() < 1e-15);
        assert!(four.within(5.0), "{four:?}");
        assert!(matches!(verify_moment_identity(&p, &p, &lat, 10_000, 0), Err(Error::Capacity(_))));
        assert!(verify_moment_identity(&p[..1], &p[..1], &lat, 100, 0).is_err());
    }

    #[test]
    fn regulated_lattice_converges() {
        let m = MassParam::new(1.0).unwrap();
        let lats = [MomentumLattice::with_gaussian_regulator(8.0, 32, m, 0.5).unwrap()];
        let scan = cutoff_convergence_scan(
            &SpacetimePoint::at_rest([0.0; 3]),
            &SpacetimePoint::at_rest([1.0, 0.0, 0.0]),
            &lats,
        )
        .unwrap();
        assert!(scan[0].relative < 1e-5, "{scan:?}");
    }
}
