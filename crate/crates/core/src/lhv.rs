//! Local hidden-variable models.
//!
//! A model is a probability space for λ plus two response functions bounded
//! by 1. Correlations `E ξ_α η_β` are estimated by Monte Carlo over the
//! stream layout of [`crate::rng`]; the bound is checked on every sample.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use rand::Rng;

use crate::quad::periodic_mean;
use crate::rng::{block_mean, StreamRng};
use crate::spin::AngleSet;
use crate::{Error, Result};

/// Minimum sample count for a Monte Carlo correlation.
pub const MIN_SAMPLES: usize = 1000;

/// Nodes of the periodic trapezoid rule used by [`analytic_cosine_lhv`].
pub const COSINE_QUADRATURE_NODES: usize = 1 << 12;

pub trait HiddenVariableModel: Sync {
    type Lambda;

    fn sample_lambda(&self, rng: &mut StreamRng) -> Self::Lambda;

    /// Alice's response at setting `alpha`.
    fn xi(&self, alpha: f64, lambda: &Self::Lambda) -> f64;

    /// Bob's response at setting `beta`.
    fn eta(&self, beta: f64, lambda: &Self::Lambda) -> f64;
}

/// `ξ_α(λ) = √(2g) cos(α − λ)`, `η_β(λ) = √(2g) cos(β − λ)`, λ uniform on
/// `[0, 2π)`. Reproduces `g cos(α − β)` for `0 ≤ g ≤ 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineModel {
    g: f64,
    amplitude: f64,
}

impl CosineModel {
    pub fn new(g: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&g) {
            return Err(Error::Domain { what: "g", value: g, domain: "[0, 1/2]" });
        }
        Ok(CosineModel { g, amplitude: (2.0 * g).sqrt() })
    }

    pub fn g(&self) -> f64 {
        self.g
    }
}

impl HiddenVariableModel for CosineModel {
    type Lambda = f64;

    fn sample_lambda(&self, rng: &mut StreamRng) -> f64 {
        rng.random_range(0.0..2.0 * PI)
    }

    fn xi(&self, alpha: f64, lambda: &f64) -> f64 {
        self.amplitude * (alpha - lambda).cos()
    }

    fn eta(&self, beta: f64, lambda: &f64) -> f64 {
        self.amplitude * (beta - lambda).cos()
    }
}

/// Setting-independent responses; `ConstantModel::new(0.0, 0.0)` is the zero
/// process. Values are not validated here, so a contract-violating model can
/// be built and is rejected during sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantModel {
    pub xi: f64,
    pub eta: f64,
}

impl ConstantModel {
    pub fn new(xi: f64, eta: f64) -> Self {
        ConstantModel { xi, eta }
    }
}

impl HiddenVariableModel for ConstantModel {
    type Lambda = ();

    fn sample_lambda(&self, _rng: &mut StreamRng) {}

    fn xi(&self, _alpha: f64, _lambda: &()) -> f64 {
        self.xi
    }

    fn eta(&self, _beta: f64, _lambda: &()) -> f64 {
        self.eta
    }
}

/// How a [`TrigResponseModel`] maps its trigonometric polynomial into [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Squash {
    /// ±1 outcomes (deterministic strategies given λ).
    Sign,
    /// `tanh(κ·p)` with the polynomial pre-normalized to |p| ≤ 1.
    Tanh,
}

#[derive(Debug, Clone, PartialEq)]
struct TrigTerm {
    amplitude: f64,
    harmonic: f64,
    hidden_harmonic: f64,
    phase: f64,
}

/// Randomly generated model with λ = (θ, u), θ uniform on the circle and u
/// uniform on [0, 1). Each side's response is a squashed trigonometric
/// polynomial `Σ c_k cos(k·angle + q_k·θ + φ_k) + d·(2u − 1)`, normalized so
/// the polynomial itself never exceeds 1 in magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigResponseModel {
    alice: Vec<TrigTerm>,
    bob: Vec<TrigTerm>,
    alice_bias: f64,
    bob_bias: f64,
    squash: Squash,
    sharpness: f64,
}

impl TrigResponseModel {
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let squash = if rng.random_bool(0.5) { Squash::Sign } else { Squash::Tanh };
        let side = |rng: &mut R| {
            let n_terms = rng.random_range(1..=3);
            let mut terms: Vec<TrigTerm> = (0..n_terms)
                .map(|_| TrigTerm {
                    amplitude: rng.random_range(0.1..1.0),
                    harmonic: rng.random_range(0..=2) as f64,
                    hidden_harmonic: rng.random_range(1..=3) as f64,
                    phase: rng.random_range(0.0..2.0 * PI),
                })
                .collect();
            let bias = if rng.random_bool(0.3) { rng.random_range(0.0..0.5) } else { 0.0 };
            let total: f64 = terms.iter().map(|t| t.amplitude).sum::<f64>() + bias;
            for t in &mut terms {
                t.amplitude /= total;
            }
            (terms, bias / total)
        };
        let (alice, alice_bias) = side(rng);
        let (bob, bob_bias) = side(rng);
        TrigResponseModel {
            alice,
            bob,
            alice_bias,
            bob_bias,
            squash,
            sharpness: rng.random_range(0.5..8.0),
        }
    }

    fn response(&self, terms: &[TrigTerm], bias: f64, angle: f64, lambda: &(f64, f64)) -> f64 {
        let (theta, u) = *lambda;
        let p: f64 = terms
            .iter()
            .map(|t| t.amplitude * (t.harmonic * angle + t.hidden_harmonic * theta + t.phase).cos())
            .sum::<f64>()
            + bias * (2.0 * u - 1.0);
        match self.squash {
            Squash::Sign => {
                if p >= 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            Squash::Tanh => (self.sharpness * p).tanh(),
        }
    }
}

impl HiddenVariableModel for TrigResponseModel {
    type Lambda = (f64, f64);

    fn sample_lambda(&self, rng: &mut StreamRng) -> (f64, f64) {
        (rng.random_range(0.0..2.0 * PI), rng.random())
    }

    fn xi(&self, alpha: f64, lambda: &(f64, f64)) -> f64 {
        self.response(&self.alice, self.alice_bias, alpha, lambda)
    }

    fn eta(&self, beta: f64, lambda: &(f64, f64)) -> f64 {
        self.response(&self.bob, self.bob_bias, beta, lambda)
    }
}

/// Convex mixture of deterministic ±1 strategies on a finite angle set.
///
/// λ is the index of the strategy, drawn with the mixture weights. Settings
/// not in the angle set get response 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureModel {
    alphas: Vec<f64>,
    betas: Vec<f64>,
    strategies: Vec<(Vec<i8>, Vec<i8>)>,
    cumulative: Vec<f64>,
}

impl MixtureModel {
    pub fn new(
        alphas: Vec<f64>,
        betas: Vec<f64>,
        strategies: Vec<(Vec<i8>, Vec<i8>)>,
        weights: &[f64],
    ) -> Result<Self> {
        if strategies.is_empty() || strategies.len() != weights.len() {
            return Err(Error::validation("mixture needs one weight per strategy"));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::validation("mixture weights must be non-negative"));
        }
        for (s, t) in &strategies {
            if s.len() != alphas.len() || t.len() != betas.len() {
                return Err(Error::DimensionMismatch {
                    expected: format!("{}x{} strategy", alphas.len(), betas.len()),
                    got: format!("{}x{}", s.len(), t.len()),
                });
            }
        }
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::validation("mixture weights sum to zero"));
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(MixtureModel { alphas, betas, strategies, cumulative })
    }

    fn setting_index(settings: &[f64], angle: f64) -> Option<usize> {
        settings.iter().position(|&a| (a - angle).abs() <= 1e-12)
    }
}

impl HiddenVariableModel for MixtureModel {
    type Lambda = usize;

    fn sample_lambda(&self, rng: &mut StreamRng) -> usize {
        let u: f64 = rng.random();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.strategies.len() - 1)
    }

    fn xi(&self, alpha: f64, lambda: &usize) -> f64 {
        Self::setting_index(&self.alphas, alpha)
            .map_or(0.0, |i| f64::from(self.strategies[*lambda].0[i]))
    }

    fn eta(&self, beta: f64, lambda: &usize) -> f64 {
        Self::setting_index(&self.betas, beta)
            .map_or(0.0, |j| f64::from(self.strategies[*lambda].1[j]))
    }
}

/// Monte Carlo estimate of `E ξ_α η_β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationEstimate {
    pub mean: f64,
    /// Sample standard deviation over `√n`.
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// `∫₀^{2π} √(2g)cos(α−λ) · √(2g)cos(β−λ) dλ/2π` by the periodic trapezoid
/// rule on [`COSINE_QUADRATURE_NODES`] nodes.
pub fn analytic_cosine_lhv(g: f64, alpha: f64, beta: f64) -> Result<f64> {
    let model = CosineModel::new(g)?;
    Ok(periodic_mean(
        |lambda| model.xi(alpha, &lambda) * model.eta(beta, &lambda),
        COSINE_QUADRATURE_NODES,
    ))
}

/// `E ξ_α η_β` over `n` draws, using angle-pair stream 0.
pub fn monte_carlo_correlation<M: HiddenVariableModel>(
    model: &M,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
) -> Result<CorrelationEstimate> {
    monte_carlo_correlation_on_stream(model, alpha, beta, n, seed, 0)
}

/// As [`monte_carlo_correlation`], drawing from the streams of angle pair
/// `pair`.
pub fn monte_carlo_correlation_on_stream<M: HiddenVariableModel>(
    model: &M,
    alpha: f64,
    beta: f64,
    n: usize,
    seed: u64,
    pair: u32,
) -> Result<CorrelationEstimate> {
    if n < MIN_SAMPLES {
        return Err(Error::Domain {
            what: "n",
            value: n as f64,
            domain: "n >= 1000",
        });
    }
    let stats = block_mean(n, seed, pair, |rng| {
        let lambda = model.sample_lambda(rng);
        let x = model.xi(alpha, &lambda);
        if !(x.abs() <= 1.0) {
            return Err(Error::ModelContract { which: "xi", angle: alpha, value: x });
        }
        let y = model.eta(beta, &lambda);
        if !(y.abs() <= 1.0) {
            return Err(Error::ModelContract { which: "eta", angle: beta, value: y });
        }
        Ok(x * y)
    })?;
    Ok(CorrelationEstimate { mean: stats.mean, stderr: stats.stderr(), n_samples: n, seed })
}

/// Verdict of the visibility thresholds `1/2` and `1/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GClassification {
    /// `g ≤ 1/2`: the cosine construction is a solution.
    Representable,
    /// `g > 1/√2`: the CHSH bound excludes every solution.
    NotRepresentable,
    /// `1/2 < g ≤ 1/√2`: not settled; no construction is implemented.
    OpenGap,
}

impl GClassification {
    pub fn as_str(&self) -> &'static str {
        match self {
            GClassification::Representable => "representable",
            GClassification::NotRepresentable => "not-representable",
            GClassification::OpenGap => "open-gap",
        }
    }
}

pub fn classify_g(g: f64) -> Result<GClassification> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::Domain { what: "g", value: g, domain: "[0, 1]" });
    }
    Ok(if g <= 0.5 {
        GClassification::Representable
    } else if g > FRAC_1_SQRT_2 {
        GClassification::NotRepresentable
    } else {
        GClassification::OpenGap
    })
}

/// CHSH combination of four Monte Carlo correlations.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshEstimate {
    pub value: f64,
    /// Propagated from the four independent terms: `√Σ stderr²`.
    pub stderr: f64,
    /// `terms[i][j]` estimates `E ξ_{α_i} η_{β_j}`.
    pub terms: [[CorrelationEstimate; 2]; 2],
}

/// Pair `(i, j)` draws from stream `2i + j`, so the four terms are
/// independent.
pub fn chsh_of_model<M: HiddenVariableModel>(
    model: &M,
    angles: &AngleSet,
    n: usize,
    seed: u64,
) -> Result<ChshEstimate> {
    if angles.alphas().len() != 2 || angles.betas().len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: "2 alphas and 2 betas".into(),
            got: format!("{} alphas and {} betas", angles.alphas().len(), angles.betas().len()),
        });
    }
    let term = |i: usize, j: usize| {
        monte_carlo_correlation_on_stream(
            model,
            angles.alphas()[i],
            angles.betas()[j],
            n,
            seed,
            (2 * i + j) as u32,
        )
    };
    let terms = [[term(0, 0)?, term(0, 1)?], [term(1, 0)?, term(1, 1)?]];
    let value = (terms[0][0].mean - terms[0][1].mean).abs() + (terms[1][0].mean + terms[1][1].mean).abs();
    let stderr = terms
        .iter()
        .flatten()
        .map(|t| t.stderr * t.stderr)
        .sum::<f64>()
        .sqrt();
    Ok(ChshEstimate { value, stderr, terms })
}
