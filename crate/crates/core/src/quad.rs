//! One-dimensional quadrature: Gauss–Legendre rules, an adaptive bisection
//! driver and the periodic trapezoid rule.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut sum = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            sum += w * f(mid + half * x);
        }
        sum * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

fn rule20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error_estimate: f64,
    pub intervals: usize,
}

/// Adaptive 20-point Gauss–Legendre with interval bisection.
///
/// An interval is accepted when the one-rule value and the two-half value
/// agree within its share of `max(abs_tol, rel_tol·|I|)`. Intervals are
/// processed in a fixed order, so the result is deterministic.
pub fn adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    adaptive_breaks(f, &[a, b], abs_tol, rel_tol)
}

/// [`adaptive`] over consecutive segments of `breaks`.
pub fn adaptive_breaks<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Quadrature> {
    const MAX_INTERVALS: usize = 20_000;
    let rule = rule20();
    let total_len = breaks.last().unwrap() - breaks[0];
    // First a coarse pass to set the relative scale.
    let coarse: f64 = breaks
        .windows(2)
        .map(|w| rule.integrate(&f, w[0], w[1]))
        .sum();
    let target = abs_tol.max(rel_tol * coarse.abs());

    let mut stack: Vec<(f64, f64, f64)> = breaks
        .windows(2)
        .rev()
        .map(|w| (w[0], w[1], rule.integrate(&f, w[0], w[1])))
        .collect();
    let mut value = 0.0;
    let mut comp = 0.0;
    let mut err = 0.0;
    let mut intervals = 0usize;
    while let Some((lo, hi, whole)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(&f, lo, mid);
        let right = rule.integrate(&f, mid, hi);
        let halves = left + right;
        let diff = (halves - whole).abs();
        let share = target * (hi - lo) / total_len;
        if diff <= share || (hi - lo) <= 1e-13 * total_len.abs().max(1e-300) {
            // Neumaier summation of accepted pieces.
            let t = value + halves;
            if value.abs() >= halves.abs() {
                comp += (value - t) + halves;
            } else {
                comp += (halves - t) + value;
            }
            value = t;
            err += diff;
            intervals += 1;
        } else {
            if stack.len() + intervals > MAX_INTERVALS {
                return Err(Error::Numerical {
                    message: format!("adaptive quadrature on [{}, {}] did not converge", breaks[0], breaks.last().unwrap()),
                    estimate: diff,
                    tolerance: share,
                });
            }
            stack.push((mid, hi, right));
            stack.push((lo, mid, left));
        }
        if !value.is_finite() {
            return Err(Error::Numerical {
                message: "non-finite integrand".into(),
                estimate: f64::NAN,
                tolerance: target,
            });
        }
    }
    Ok(Quadrature {
        value: value + comp,
        error_estimate: err,
        intervals,
    })
}

/// Composite fixed-order Gauss–Legendre over consecutive panels.
pub fn composite<F: Fn(f64) -> f64>(f: F, edges: &[f64], rule: &GaussLegendre) -> f64 {
    edges.windows(2).map(|w| rule.integrate(&f, w[0], w[1])).sum()
}

/// Trapezoid rule for a 2π-periodic integrand: `(1/n) Σ f(2πk/n)`, i.e. the
/// mean over one period. Spectrally accurate for smooth periodic `f`.
pub fn periodic_mean<F: Fn(f64) -> f64>(f: F, n: usize) -> f64 {
    let h = 2.0 * PI / n as f64;
    (0..n).map(|k| f(k as f64 * h)).sum::<f64>() / n as f64
}
