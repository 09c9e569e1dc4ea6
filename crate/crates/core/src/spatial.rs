//! Spatial part of the two-particle wavefunction.
//!
//! Packets are isotropic Gaussians whose *density* has standard deviation
//! `ε_t`: `|ψ|²(r) = (2π ε_t²)^{-3/2} exp(−|r − c|² / 2ε_t²)`, with free
//! spreading `ε_t = ε √(1 + ħ²t²/(M²ε⁴))` and a stationary center. All
//! region probabilities over axis-aligned boxes are closed-form products of
//! one-dimensional Gaussian CDF differences.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::lhv::CorrelationEstimate;
use crate::rng::block_mean;
use crate::spin::{singlet_correlation, AngleSet, UnitVector3};
use crate::{Error, Result};

pub type Vec3 = [f64; 3];

fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain { what: "t", value: t, domain: "[0, ∞)" });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket3D {
    center: Vec3,
    eps0: f64,
    mass: f64,
    hbar: f64,
}

impl GaussianPacket3D {
    /// Packet in natural units `ħ = M = 1`.
    pub fn new(center: Vec3, eps0: f64) -> Result<Self> {
        Self::with_units(center, eps0, 1.0, 1.0)
    }

    pub fn with_units(center: Vec3, eps0: f64, mass: f64, hbar: f64) -> Result<Self> {
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::validation("packet center must be finite"));
        }
        for (name, v) in [("eps0", eps0), ("mass", mass), ("hbar", hbar)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::validation(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(GaussianPacket3D { center, eps0, mass, hbar })
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }
    pub fn eps0(&self) -> f64 {
        self.eps0
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn translated(&self, l: &Vec3) -> Self {
        let mut p = *self;
        for k in 0..3 {
            p.center[k] += l[k];
        }
        p
    }

    /// `ε_t = ε √(1 + ħ²t²/(M²ε⁴))`.
    pub fn width_at_time(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        let r = self.hbar * t / (self.mass * self.eps0 * self.eps0);
        Ok(self.eps0 * r.hypot(1.0))
    }

    /// Large-t form `(ħ/Mε) t`.
    pub fn asymptotic_width(&self, t: f64) -> f64 {
        self.hbar * t / (self.mass * self.eps0)
    }

    /// `|ψ(r, t)|²`.
    pub fn density(&self, r: &Vec3, t: f64) -> Result<f64> {
        let w = self.width_at_time(t)?;
        let d2: f64 = (0..3).map(|k| (r[k] - self.center[k]).powi(2)).sum();
        Ok((2.0 * PI * w * w).powf(-1.5) * (-d2 / (2.0 * w * w)).exp())
    }

    /// `∫_box |ψ(r, t)|² d³r`.
    pub fn region_probability(&self, region: &BoxRegion, t: f64) -> Result<f64> {
        let w = self.width_at_time(t)?;
        Ok((0..3)
            .map(|k| {
                gaussian_interval((region.lo[k] - self.center[k]) / w, (region.hi[k] - self.center[k]) / w)
            })
            .product())
    }

    /// `∫_{|r| ≥ L} |ψ(r, t)|² d³r`.
    pub fn ball_exterior_probability(&self, radius: f64, t: f64) -> Result<f64> {
        let w = self.width_at_time(t)?;
        Ok(radial_survival(radius, norm(&self.center), w))
    }
}

/// `Φ(b) − Φ(a)` for the standard normal, computed through `erfc` on the
/// tail side so far-out intervals keep full relative precision.
pub fn gaussian_interval(a: f64, b: f64) -> f64 {
    debug_assert!(a <= b);
    let c = FRAC_1_SQRT_2;
    if a >= 0.0 {
        0.5 * (libm::erfc(a * c) - libm::erfc(b * c))
    } else if b <= 0.0 {
        0.5 * (libm::erfc(-b * c) - libm::erfc(-a * c))
    } else {
        1.0 - 0.5 * (libm::erfc(-a * c) + libm::erfc(b * c))
    }
    .max(0.0)
}

/// `P(|X| ≥ ρ)` for `X ~ N(c, σ² I₃)` with `|c| = d` (noncentral chi, 3 dof).
fn radial_survival(rho: f64, d: f64, sigma: f64) -> f64 {
    if rho <= 0.0 {
        return 1.0;
    }
    let a = sigma * std::f64::consts::SQRT_2;
    let gauss = |x: f64| (-x * x / (2.0 * sigma * sigma)).exp();
    let s = if d <= 1e-8 * sigma {
        libm::erfc(rho / a) + (2.0 / PI).sqrt() * (rho / sigma) * gauss(rho)
    } else {
        0.5 * (libm::erfc((rho - d) / a) + libm::erfc((rho + d) / a))
            - sigma / (d * (2.0 * PI).sqrt()) * (gauss(rho + d) - gauss(rho - d))
    };
    s.clamp(0.0, 1.0)
}

/// Axis-aligned box `[lo, hi]`; infinite limits are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRegion {
    lo: Vec3,
    hi: Vec3,
}

impl BoxRegion {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        for k in 0..3 {
            if lo[k].is_nan() || hi[k].is_nan() || !(lo[k] < hi[k]) {
                return Err(Error::validation(format!(
                    "box needs lo < hi on every axis, axis {k} has [{}, {}]",
                    lo[k], hi[k]
                )));
            }
        }
        Ok(BoxRegion { lo, hi })
    }

    pub fn whole_space() -> Self {
        BoxRegion { lo: [f64::NEG_INFINITY; 3], hi: [f64::INFINITY; 3] }
    }

    /// `{r : r_axis ≥ at}` or, with `upper = false`, `{r : r_axis ≤ at}`.
    pub fn half_space(axis: usize, at: f64, upper: bool) -> Result<Self> {
        if axis > 2 {
            return Err(Error::validation("axis must be 0, 1 or 2"));
        }
        let mut b = Self::whole_space();
        if upper {
            b.lo[axis] = at;
        } else {
            b.hi[axis] = at;
        }
        Ok(b)
    }

    /// Cube of half-side `half` around `center`.
    pub fn cube(center: Vec3, half: f64) -> Result<Self> {
        Self::new(
            [center[0] - half, center[1] - half, center[2] - half],
            [center[0] + half, center[1] + half, center[2] + half],
        )
    }

    pub fn lo(&self) -> Vec3 {
        self.lo
    }
    pub fn hi(&self) -> Vec3 {
        self.hi
    }

    /// `O(l)`.
    pub fn translated(&self, l: &Vec3) -> Self {
        let mut b = *self;
        for k in 0..3 {
            b.lo[k] += l[k];
            b.hi[k] += l[k];
        }
        b
    }

    pub fn contains(&self, r: &Vec3) -> bool {
        (0..3).all(|k| self.lo[k] <= r[k] && r[k] <= self.hi[k])
    }

    /// Distance from the origin to the nearest point of the box.
    pub fn min_norm(&self) -> f64 {
        let nearest: Vec3 = std::array::from_fn(|k| 0.0f64.clamp(self.lo[k], self.hi[k]));
        norm(&nearest)
    }
}

/// `φ(r₁, r₂) = ψ₁(r₁) ψ₂(r₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductWavefunction {
    pub packet1: GaussianPacket3D,
    pub packet2: GaussianPacket3D,
}

impl ProductWavefunction {
    pub fn new(packet1: GaussianPacket3D, packet2: GaussianPacket3D) -> Self {
        ProductWavefunction { packet1, packet2 }
    }
}

pub fn width_at_time(p: &GaussianPacket3D, t: f64) -> Result<f64> {
    p.width_at_time(t)
}

pub fn region_probability(p: &GaussianPacket3D, region: &BoxRegion, t: f64) -> Result<f64> {
    p.region_probability(region, t)
}

/// `g(O_A, O_B) = ∫_{O_A}|ψ₁|² · ∫_{O_B}|ψ₂|²`.
pub fn g_factor(wf: &ProductWavefunction, region_a: &BoxRegion, region_b: &BoxRegion, t: f64) -> Result<f64> {
    Ok(wf.packet1.region_probability(region_a, t)? * wf.packet2.region_probability(region_b, t)?)
}

/// `ω(σ·a P_{O_A} ⊗ σ·b P_{O_B}) = g(O_A, O_B) D_spin(a, b)`.
pub fn local_correlation(
    wf: &ProductWavefunction,
    a: &UnitVector3,
    b: &UnitVector3,
    region_a: &BoxRegion,
    region_b: &BoxRegion,
    t: f64,
) -> Result<f64> {
    Ok(g_factor(wf, region_a, region_b, t)? * singlet_correlation(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub l_norm: f64,
    pub correlation: f64,
    pub g: f64,
}

/// Local correlation with detector A translated by each `l`. The
/// single-detector terms `ω(σ·a P ⊗ I)` vanish identically, so the
/// correlation itself is the disentanglement residual.
pub fn disentanglement_scan(
    wf: &ProductWavefunction,
    a: &UnitVector3,
    b: &UnitVector3,
    region_a: &BoxRegion,
    region_b: &BoxRegion,
    translations: &[Vec3],
    t: f64,
) -> Result<Vec<ScanPoint>> {
    if translations.is_empty() {
        return Err(Error::validation("translation list is empty"));
    }
    let d = singlet_correlation(a, b);
    translations
        .iter()
        .map(|l| {
            let g = g_factor(wf, &region_a.translated(l), region_b, t)?;
            Ok(ScanPoint { l_norm: norm(l), correlation: g * d, g })
        })
        .collect()
}

/// `|φ(r₁, r₂, t)|² cos(α − β)`.
pub fn modified_local_equation(
    wf: &ProductWavefunction,
    r1: &Vec3,
    r2: &Vec3,
    t: f64,
    alpha: f64,
    beta: f64,
) -> Result<f64> {
    Ok(wf.packet1.density(r1, t)? * wf.packet2.density(r2, t)? * (alpha - beta).cos())
}

/// One cell of the product-representation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductCell {
    pub alpha: f64,
    pub beta: f64,
    pub estimate: CorrelationEstimate,
    /// `g(O_A(l), O_B) cos(α − β)`.
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductRepresentation {
    /// `ε = ∫_{B_L} |ψ₁|²`.
    pub epsilon: f64,
    pub g: f64,
    /// Largest `|ξ_spin|`, `|η_spin|` seen while sampling.
    pub max_spin_response: f64,
    pub cells: Vec<ProductCell>,
}

/// Samples the three independent classical variables of the product
/// representation and estimates `E[χ_{O_A}(r₁) χ_{O_B}(r₂) ξ_spin(α,φ) ξ_spin(β,φ)]`.
///
/// `r₁` has density `(1/ε)|ψ₁|²` on `B_L = {|r| ≥ L}`, `r₂` has density
/// `|ψ₂|²`, and `φ` is uniform on `[0, 2π)` with
/// `ξ_spin(α, φ) = √(2ε) cos(α − φ)`. Grid cell `(i, j)` uses stream pair
/// `i·|β| + j`.
pub fn product_representation(
    wf: &ProductWavefunction,
    region_a: &BoxRegion,
    region_b: &BoxRegion,
    radius: f64,
    angles: &AngleSet,
    n: usize,
    seed: u64,
    t: f64,
) -> Result<ProductRepresentation> {
    if !(radius > 0.0) {
        return Err(Error::Precondition(format!("ball radius L must be positive, got {radius}")));
    }
    if region_a.min_norm() < radius {
        return Err(Error::Precondition(format!(
            "detector A (nearest point at |r| = {}) is not inside B_L with L = {radius}",
            region_a.min_norm()
        )));
    }
    let epsilon = wf.packet1.ball_exterior_probability(radius, t)?;
    if !(epsilon < 0.5) {
        return Err(Error::Precondition(format!("ε(L) = {epsilon} is not below 1/2")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Precondition("packet 1 has no mass in B_L".into()));
    }
    if n < crate::lhv::MIN_SAMPLES {
        return Err(Error::Domain { what: "n", value: n as f64, domain: "n >= 1000" });
    }
    let g = g_factor(wf, region_a, region_b, t)?;
    let width1 = wf.packet1.width_at_time(t)?;
    let width2 = wf.packet2.width_at_time(t)?;
    let exterior = ExteriorSampler::new(wf.packet1.center, width1, radius, epsilon);
    let amplitude = (2.0 * epsilon).sqrt();
    let c2 = wf.packet2.center;

    let mut cells = Vec::new();
    for (i, &alpha) in angles.alphas().iter().enumerate() {
        for (j, &beta) in angles.betas().iter().enumerate() {
            let pair = (i * angles.betas().len() + j) as u32;
            let stats = block_mean(n, seed, pair, |rng| {
                let r1 = exterior.sample(rng);
                let r2: Vec3 = std::array::from_fn(|k| c2[k] + width2 * rng.sample::<f64, _>(StandardNormal));
                let phi: f64 = rng.random_range(0.0..2.0 * PI);
                let xi_space = if region_a.contains(&r1) { 1.0 } else { 0.0 };
                let eta_space = if region_b.contains(&r2) { 1.0 } else { 0.0 };
                let xi_spin = amplitude * (alpha - phi).cos();
                let eta_spin = amplitude * (beta - phi).cos();
                if xi_spin.abs() > 1.0 || eta_spin.abs() > 1.0 {
                    return Err(Error::ModelContract { which: "xi_spin", angle: alpha, value: xi_spin });
                }
                Ok(xi_space * eta_space * xi_spin * eta_spin)
            })?;
            cells.push(ProductCell {
                alpha,
                beta,
                estimate: CorrelationEstimate { mean: stats.mean, stderr: stats.stderr(), n_samples: n, seed },
                analytic: g * (alpha - beta).cos(),
            });
        }
    }
    Ok(ProductRepresentation { epsilon, g, max_spin_response: amplitude, cells })
}

/// Exact sampler for `N(c, σ² I₃)` conditioned on `|r| ≥ L`.
///
/// The radius is drawn by inverting the conditional survival function; given
/// the radius, the direction is von Mises–Fisher around `c/|c|` with
/// concentration `ρ|c|/σ²`.
struct ExteriorSampler {
    distance: f64,
    sigma: f64,
    radius: f64,
    mass: f64,
    frame: [Vec3; 3],
}

impl ExteriorSampler {
    fn new(center: Vec3, sigma: f64, radius: f64, mass: f64) -> Self {
        let distance = norm(&center);
        let axis = if distance > 0.0 {
            [center[0] / distance, center[1] / distance, center[2] / distance]
        } else {
            [0.0, 0.0, 1.0]
        };
        let helper = if axis[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
        let u = normalize(cross(&axis, &helper));
        let v = cross(&axis, &u);
        ExteriorSampler { distance, sigma, radius, mass, frame: [u, v, axis] }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec3 {
        let u: f64 = rng.random();
        let target = self.mass * (1.0 - u);
        let (mut lo, mut hi) = (self.radius, self.radius + self.distance + 40.0 * self.sigma);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if radial_survival(mid, self.distance, self.sigma) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        let rho = 0.5 * (lo + hi);
        let kappa = rho * self.distance / (self.sigma * self.sigma);
        let w: f64 = if kappa < 1e-8 {
            rng.random_range(-1.0..1.0)
        } else {
            let v: f64 = rng.random();
            (1.0 + (v + (1.0 - v) * (-2.0 * kappa).exp()).ln() / kappa).clamp(-1.0, 1.0)
        };
        let psi: f64 = rng.random_range(0.0..2.0 * PI);
        let s = (1.0 - w * w).max(0.0).sqrt();
        let [e1, e2, e3] = self.frame;
        std::array::from_fn(|k| rho * (s * psi.cos() * e1[k] + s * psi.sin() * e2[k] + w * e3[k]))
    }
}

fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(v: Vec3) -> Vec3 {
    let n = norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive;
    use rand::SeedableRng;

    fn unit_packet() -> GaussianPacket3D {
        GaussianPacket3D::new([0.0; 3], 1.0).unwrap()
    }

    #[test]
    fn width_examples() {
        let p = unit_packet();
        assert_eq!(p.width_at_time(0.0).unwrap(), 1.0);
        assert!((p.width_at_time(1.0).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let t = 1e6;
        assert!((p.width_at_time(t).unwrap() / p.asymptotic_width(t) - 1.0).abs() < 1e-9);
        assert!(matches!(p.width_at_time(-1.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn region_probability_examples() {
        let p = GaussianPacket3D::new([0.3, -1.0, 2.0], 1.0).unwrap();
        assert!((p.region_probability(&BoxRegion::whole_space(), 0.0).unwrap() - 1.0).abs() < 1e-15);
        let half = BoxRegion::half_space(1, -1.0, true).unwrap();
        assert!((p.region_probability(&half, 0.0).unwrap() - 0.5).abs() < 1e-15);
        // 1-D oracle: adaptive quadrature of the standard normal density over [-1, 1]
        let one_d = adaptive(|x| (-x * x / 2.0).exp() / (2.0 * PI).sqrt(), -1.0, 1.0, 1e-15, 1e-14)
            .unwrap()
            .value;
        let cube = BoxRegion::cube(p.center(), 1.0).unwrap();
        let v = p.region_probability(&cube, 0.0).unwrap();
        assert!((v - one_d.powi(3)).abs() < 1e-13);
        assert!((v - 0.318_18).abs() < 1e-5);
    }

    #[test]
    fn g_factor_examples() {
        let wf = ProductWavefunction::new(unit_packet(), GaussianPacket3D::new([5.0, 0.0, 0.0], 1.0).unwrap());
        let all = BoxRegion::whole_space();
        assert!((g_factor(&wf, &all, &all, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let ha = BoxRegion::half_space(0, 0.0, true).unwrap();
        let hb = BoxRegion::half_space(2, 0.0, false).unwrap();
        assert!((g_factor(&wf, &ha, &hb, 0.0).unwrap() - 0.25).abs() < 1e-15);
        let far = BoxRegion::cube([0.0; 3], 1.0).unwrap().translated(&[20.0, 0.0, 0.0]);
        let g = g_factor(&wf, &far, &all, 0.0).unwrap();
        assert!(g < 1e-10 && g > 0.0);
    }

    #[test]
    fn local_correlation_examples() {
        let wf = ProductWavefunction::new(unit_packet(), unit_packet());
        let z = UnitVector3::new(0.0, 0.0, 1.0).unwrap();
        let all = BoxRegion::whole_space();
        assert!((local_correlation(&wf, &z, &z, &all, &all, 0.0).unwrap() + 1.0).abs() < 1e-15);
        let ha = BoxRegion::half_space(0, 0.0, true).unwrap();
        assert!((local_correlation(&wf, &z, &z, &ha, &ha, 0.0).unwrap() + 0.25).abs() < 1e-15);
    }

    #[test]
    fn box_validation() {
        assert!(BoxRegion::new([0.0; 3], [1.0, 0.0, 1.0]).is_err());
        assert!(BoxRegion::new([0.0; 3], [1.0, f64::NAN, 1.0]).is_err());
        let b = BoxRegion::new([2.0, -1.0, -1.0], [3.0, 1.0, 1.0]).unwrap();
        assert_eq!(b.min_norm(), 2.0);
        let b = BoxRegion::new([2.0, 1.0, -1.0], [3.0, 4.0, 1.0]).unwrap();
        assert!((b.min_norm() - 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn radial_survival_matches_quadrature() {
        // oracle: radial density of the noncentral 3-D Gaussian
        for &(d, sigma, rho) in &[(0.0f64, 1.0f64, 2.0f64), (1.5, 0.7, 2.0), (3.0, 1.0, 1.0), (0.5, 2.0, 4.0)] {
            let density = |r: f64| {
                if d == 0.0 {
                    (2.0 / PI).sqrt() * r * r / sigma.powi(3) * (-r * r / (2.0 * sigma * sigma)).exp()
                } else {
                    r / (d * sigma * (2.0 * PI).sqrt())
                        * ((-(r - d).powi(2) / (2.0 * sigma * sigma)).exp()
                            - (-(r + d).powi(2) / (2.0 * sigma * sigma)).exp())
                }
            };
            let inside = adaptive(density, 0.0, rho, 1e-15, 1e-13).unwrap().value;
            let s = radial_survival(rho, d, sigma);
            assert!((s - (1.0 - inside)).abs() < 1e-12, "d={d} σ={sigma} ρ={rho}: {s} vs {}", 1.0 - inside);
        }
    }

    #[test]
    fn exterior_sampler_lands_outside_ball_with_right_box_mass() {
        let p = GaussianPacket3D::new([1.0, 0.5, 0.0], 1.0).unwrap();
        let radius = 2.0;
        let eps = p.ball_exterior_probability(radius, 0.0).unwrap();
        let sampler = ExteriorSampler::new(p.center(), 1.0, radius, eps);
        let region = BoxRegion::new([2.0, -1.0, -1.0], [4.0, 2.0, 1.0]).unwrap();
        let expected = p.region_probability(&region, 0.0).unwrap() / eps;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let n = 200_000;
        let mut hits = 0usize;
        for _ in 0..n {
            let r = sampler.sample(&mut rng);
            assert!(norm(&r) >= radius * (1.0 - 1e-12));
            hits += region.contains(&r) as usize;
        }
        let frac = hits as f64 / n as f64;
        let se = (expected * (1.0 - expected) / n as f64).sqrt();
        assert!((frac - expected).abs() < 4.0 * se, "{frac} vs {expected} ± {se}");
    }

    #[test]
    fn product_representation_preconditions() {
        let wf = ProductWavefunction::new(unit_packet(), unit_packet());
        let angles = AngleSet::new(vec![0.0], vec![0.0]).unwrap();
        let inside = BoxRegion::cube([0.0; 3], 1.0).unwrap();
        let all = BoxRegion::whole_space();
        assert!(matches!(
            product_representation(&wf, &inside, &all, 2.0, &angles, 1000, 0, 0.0),
            Err(Error::Precondition(_))
        ));
        // L too small: ε(L) ≥ 1/2
        let near = BoxRegion::new([1.0, -1.0, -1.0], [2.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            product_representation(&wf, &near, &all, 1.0, &angles, 1000, 0, 0.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn modified_equation_examples() {
        let wf = ProductWavefunction::new(unit_packet(), GaussianPacket3D::new([4.0, 0.0, 0.0], 1.0).unwrap());
        let v = modified_local_equation(&wf, &[0.0; 3], &[4.0, 0.0, 0.0], 0.0, 0.4, 0.4).unwrap();
        assert!((v - (2.0 * PI).powi(-3)).abs() < 1e-15);
        let v = modified_local_equation(&wf, &[0.0; 3], &[4.0, 0.0, 0.0], 0.0, PI / 2.0, 0.0).unwrap();
        assert!(v.abs() < 1e-17);
        assert!(modified_local_equation(&wf, &[60.0, 0.0, 0.0], &[4.0, 0.0, 0.0], 0.0, 0.0, 0.0).unwrap() < 1e-300);
    }
}
