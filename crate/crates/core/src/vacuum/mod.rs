//! Free massive scalar field in the vacuum, natural units `ħ = c = 1`,
//! signature `(+,−,−,−)`.
//!
//! The two-point function at spacelike separation `s` is
//! `W₀(s) = m K₁(m s) / (4π² s)`. Smeared covariances of equal-time Gaussian
//! test functions are evaluated through the proper-time (Schwinger)
//! representation, which turns the momentum integral into a one-dimensional
//! integral with a positive integrand:
//!
//! `W(f, g) = (1/8π²) ∫₀^∞ (v² + a)^{-3/2} exp(−m²v² − l²/(4(v² + a))) dv`
//!
//! with `l` the center separation and `a = (σ_f² + σ_g²)/2`.

pub mod bessel;
pub mod cluster;
pub mod wick;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::quad::adaptive_breaks;
use crate::spin::ComplexMatrix;
use crate::{Error, Result};

pub use bessel::{bessel_k0, bessel_k1, bessel_k_asymptotic};
pub use cluster::{cluster_decay_sweep, cluster_residual, fit_decay, residual_series, ClusterResidual, DecayFit, WickMonomial};
pub use wick::{bipartite_sum, crossing_pairing_sum, pairing_sum, wick_npoint, wick_npoint_complex, MAX_FIELDS};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacetimePoint {
    pub t: f64,
    pub r: [f64; 3],
}

impl SpacetimePoint {
    pub fn new(t: f64, r: [f64; 3]) -> Self {
        SpacetimePoint { t, r }
    }

    pub fn at_rest(r: [f64; 3]) -> Self {
        SpacetimePoint { t: 0.0, r }
    }

    /// `(x⁰ − y⁰)² − |x − y|²`; negative for spacelike pairs.
    pub fn interval(&self, other: &SpacetimePoint) -> f64 {
        let dt = self.t - other.t;
        dt * dt - self.spatial_distance(other).powi(2)
    }

    pub fn spatial_distance(&self, other: &SpacetimePoint) -> f64 {
        let d: f64 = (0..3).map(|k| (self.r[k] - other.r[k]).powi(2)).sum();
        d.sqrt()
    }

    pub fn translated(&self, l: &[f64; 3]) -> Self {
        SpacetimePoint { t: self.t, r: std::array::from_fn(|k| self.r[k] + l[k]) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct MassParam(f64);

impl MassParam {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0) || !m.is_finite() {
            return Err(Error::Domain { what: "m", value: m, domain: "(0, ∞)" });
        }
        Ok(MassParam(m))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// `W₀` at spacelike separation `s > 0`.
pub fn w0_spacelike(s: f64, m: MassParam) -> Result<f64> {
    if !(s > 0.0) || s.is_nan() {
        return Err(Error::Domain { what: "s", value: s, domain: "(0, ∞) (spacelike)" });
    }
    let m = m.0;
    Ok(m * bessel_k1(m * s)? / (4.0 * PI * PI * s))
}

/// Leading large-`λ = ms` form `m²/(4π²λ) √(π/2λ) e^{−λ}`.
pub fn w0_asymptotic(s: f64, m: MassParam) -> f64 {
    let lambda = m.0 * s;
    m.0 * m.0 / (4.0 * PI * PI * lambda) * bessel_k_asymptotic(lambda)
}

/// The same large-`λ` form written with `4π` in place of `4π²`. It is kept
/// to quantify that variant: its ratio to [`w0_asymptotic`] is exactly `π`.
pub fn w0_asymptotic_4pi(s: f64, m: MassParam) -> f64 {
    w0_asymptotic(s, m) * PI
}

/// `ω₀(φ(x)) = 0` for the free vacuum.
pub fn vacuum_one_point(_x: &SpacetimePoint) -> f64 {
    0.0
}

/// Connected two-point function `ω₀(φ(x)φ(y)) − ω₀(φ(x))ω₀(φ(y))` for a
/// spacelike pair.
pub fn statistical_dependence(x: &SpacetimePoint, y: &SpacetimePoint, m: MassParam) -> Result<f64> {
    let iv = x.interval(y);
    if !(iv < 0.0) {
        return Err(Error::Domain {
            what: "(x − y)²",
            value: iv,
            domain: "(−∞, 0) (spacelike)",
        });
    }
    Ok(w0_spacelike((-iv).sqrt(), m)? - vacuum_one_point(x) * vacuum_one_point(y))
}

/// `φ(f)` with `f(r) = c (2πσ²)^{-3/2} exp(−|r − r₀|²/2σ²)` at time `t₀`.
///
/// `σ = 0` stands for the point field `c·φ(x₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearedField {
    center: SpacetimePoint,
    width: f64,
    normalization: f64,
}

impl SmearedField {
    pub fn new(center: SpacetimePoint, width: f64) -> Result<Self> {
        Self::with_normalization(center, width, 1.0)
    }

    pub fn point(center: SpacetimePoint) -> Self {
        SmearedField { center, width: 0.0, normalization: 1.0 }
    }

    pub fn with_normalization(center: SpacetimePoint, width: f64, normalization: f64) -> Result<Self> {
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::validation(format!("smearing width must be ≥ 0, got {width}")));
        }
        if !normalization.is_finite() || center.r.iter().chain([&center.t]).any(|c| !c.is_finite()) {
            return Err(Error::validation("smeared field needs finite center and normalization"));
        }
        Ok(SmearedField { center, width, normalization })
    }

    pub fn center(&self) -> SpacetimePoint {
        self.center
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn translated(&self, l: &[f64; 3]) -> Self {
        SmearedField { center: self.center.translated(l), ..*self }
    }
}

/// `(1/8π²) ∫₀^∞ (v² + a)^{-3/2} exp(−m²v² − l²/(4(v² + a))) dv`.
///
/// Integrated in `u = ln v` on unit panels spanning every scale of the
/// integrand, so both the cutoff at small `v` and the Gaussian tail are
/// resolved.
pub fn proper_time_integral(l: f64, a: f64, m: f64) -> Result<f64> {
    if l == 0.0 && a == 0.0 {
        return Err(Error::Domain { what: "separation", value: 0.0, domain: "coincident point fields" });
    }
    let mut scales = vec![1.0 / m];
    if a > 0.0 {
        scales.push(a.sqrt());
    }
    if l > 0.0 {
        scales.push(0.5 * l);
        scales.push((0.5 * l / m).sqrt());
    }
    let lo = scales.iter().cloned().fold(f64::INFINITY, f64::min).ln() - 40.0;
    let hi = scales.iter().cloned().fold(0.0, f64::max).ln() + 5.0;
    let panels = (hi - lo).ceil() as usize;
    let breaks: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    let integrand = |u: f64| {
        let v = u.exp();
        let q = v * v + a;
        v * q.powf(-1.5) * (-m * m * v * v - l * l / (4.0 * q)).exp()
    };
    let q = adaptive_breaks(integrand, &breaks, 0.0, 1e-13)?;
    Ok(q.value / (8.0 * PI * PI))
}

/// `W(f, g) = ∫∫ f(x) W₀(x − y) g(y)` for equal-time Gaussian smearings.
/// At equal times the result is real; it is returned as a complex number
/// with zero imaginary part.
pub fn smeared_covariance(f: &SmearedField, g: &SmearedField, m: MassParam) -> Result<Complex64> {
    if f.center.t != g.center.t {
        return Err(Error::validation(format!(
            "smeared covariance needs equal times, got t = {} and t = {}",
            f.center.t, g.center.t
        )));
    }
    let l = f.center.spatial_distance(&g.center);
    let a = 0.5 * (f.width * f.width + g.width * g.width);
    let w = proper_time_integral(l, a, m.0)?;
    Ok(Complex64::new(f.normalization * g.normalization * w, 0.0))
}

/// Gram matrix `W(f_i, f_j)`.
pub fn covariance_matrix(fields: &[SmearedField], m: MassParam) -> Result<ComplexMatrix> {
    let n = fields.len();
    let mut data = vec![Complex64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in i..n {
            let w = smeared_covariance(&fields[i], &fields[j], m)?;
            data[i * n + j] = w;
            data[j * n + i] = w.conj();
        }
    }
    ComplexMatrix::from_rows(n, n, data)
}
