//! Membership of a correlation matrix in the local (LHV) polytope.
//!
//! The polytope is the convex hull of the rank-one sign matrices `s tᵀ`,
//! `s ∈ {±1}^{m_A}`, `t ∈ {±1}^{m_B}`. Membership is decided by a Phase-I
//! LP over the explicitly enumerated vertices. A feasible answer carries
//! convex weights; an infeasible one carries the separating functional read
//! off the optimal dual.

mod simplex;

use crate::spin::AngleSet;
use crate::{Error, Result};

use simplex::{solve_phase_one, ColumnSource};

/// Largest supported `m_A · m_B`.
pub const MAX_ENTRIES: usize = 25;
/// Largest supported `m_A + m_B`.
pub const MAX_SETTINGS: usize = 16;
/// Tolerance for certificate checks.
pub const CERTIFICATE_TOL: f64 = 1e-8;
const FEASIBLE_OBJECTIVE: f64 = 1e-9;
const DEDUP_TOL: f64 = 1e-12;
const BISECTION_ITERATIONS: usize = 40;

/// Target correlations `P_ij`, `|P_ij| ≤ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<f64>,
    alphas: Option<Vec<f64>>,
    betas: Option<Vec<f64>>,
}

impl CorrelationMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{rows}x{cols} = {} entries", rows * cols),
                got: format!("{}", entries.len()),
            });
        }
        if let Some(bad) = entries.iter().find(|e| !(e.abs() <= 1.0 + 1e-12)) {
            return Err(Error::validation(format!("correlation entry {bad} has magnitude above 1")));
        }
        Ok(CorrelationMatrix { rows, cols, entries, alphas: None, betas: None })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::validation("ragged correlation matrix"));
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.cols + j]
    }
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
    pub fn alphas(&self) -> Option<&[f64]> {
        self.alphas.as_deref()
    }
    pub fn betas(&self) -> Option<&[f64]> {
        self.betas.as_deref()
    }
}

/// `entries[i][j] = g·cos(α_i − β_j)`.
pub fn target_matrix(g: f64, angles: &AngleSet) -> Result<CorrelationMatrix> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::Domain { what: "g", value: g, domain: "[0, 1]" });
    }
    let entries = angles
        .alphas()
        .iter()
        .flat_map(|a| angles.betas().iter().map(move |b| g * (a - b).cos()))
        .collect();
    let mut m = CorrelationMatrix::new(angles.alphas().len(), angles.betas().len(), entries)?;
    m.alphas = Some(angles.alphas().to_vec());
    m.betas = Some(angles.betas().to_vec());
    Ok(m)
}

/// Extreme point `s tᵀ` of the local polytope.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeterministicStrategy {
    pub s: Vec<i8>,
    pub t: Vec<i8>,
}

impl DeterministicStrategy {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        f64::from(self.s[i] * self.t[j])
    }

    fn is_valid(&self, rows: usize, cols: usize) -> bool {
        self.s.len() == rows
            && self.t.len() == cols
            && self.s.iter().chain(&self.t).all(|&v| v == 1 || v == -1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedStrategy {
    pub strategy: DeterministicStrategy,
    pub weight: f64,
}

/// Linear functional `F(X) = Σ c_ij X_ij` with `F ≤ bound` on the polytope.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctional {
    pub rows: usize,
    pub cols: usize,
    pub coefficients: Vec<f64>,
    /// Maximum of `F` over all deterministic strategies.
    pub bound: f64,
}

impl LinearFunctional {
    pub fn evaluate(&self, m: &CorrelationMatrix) -> f64 {
        self.coefficients.iter().zip(&m.entries).map(|(c, x)| c * x).sum()
    }

    /// `F(target) − bound`.
    pub fn violation(&self, m: &CorrelationMatrix) -> f64 {
        self.evaluate(m) - self.bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityResult {
    pub rows: usize,
    pub cols: usize,
    pub feasible: bool,
    /// Convex weights, sorted by strategy; present iff feasible.
    pub weights: Option<Vec<WeightedStrategy>>,
    /// Separating functional; present iff infeasible.
    pub violated_functional: Option<LinearFunctional>,
    /// Feasible: max reconstruction error (entries and weight sum).
    /// Infeasible: the Phase-I optimum (L1 distance of the artificial slack).
    pub lp_residual: f64,
    pub lp_iterations: usize,
}

/// Vertices `s tᵀ` with `s_0 = +1` (global sign flip removed); column `v`
/// has `s_i` from bit `i − 1` and `t_j` from bit `m_A − 1 + j`, a set bit
/// meaning −1. The last row is the convexity constraint.
struct Vertices {
    rows: usize,
    cols: usize,
}

impl Vertices {
    fn count(&self) -> usize {
        1usize << (self.rows - 1 + self.cols)
    }

    fn sign(v: usize, bit: usize) -> f64 {
        if v >> bit & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    fn s(&self, v: usize, i: usize) -> f64 {
        if i == 0 {
            1.0
        } else {
            Self::sign(v, i - 1)
        }
    }

    fn t(&self, v: usize, j: usize) -> f64 {
        Self::sign(v, self.rows - 1 + j)
    }

    fn strategy(&self, v: usize) -> (Vec<i8>, Vec<i8>) {
        let s = (0..self.rows).map(|i| self.s(v, i) as i8).collect();
        let t = (0..self.cols).map(|j| self.t(v, j) as i8).collect();
        (s, t)
    }
}

impl ColumnSource for Vertices {
    fn n_rows(&self) -> usize {
        self.rows * self.cols + 1
    }

    fn n_cols(&self) -> usize {
        self.count()
    }

    fn column(&self, v: usize, out: &mut [f64]) {
        for i in 0..self.rows {
            let s = self.s(v, i);
            for j in 0..self.cols {
                out[i * self.cols + j] = s * self.t(v, j);
            }
        }
        out[self.rows * self.cols] = 1.0;
    }

    fn dot(&self, v: usize, y: &[f64]) -> f64 {
        let mut total = y[self.rows * self.cols];
        for i in 0..self.rows {
            let row: f64 = (0..self.cols).map(|j| y[i * self.cols + j] * self.t(v, j)).sum();
            total += self.s(v, i) * row;
        }
        total
    }
}

/// Maps each row/column of the target to a representative of its
/// identical-copy class.
struct Dedup {
    row_rep: Vec<usize>,
    col_rep: Vec<usize>,
    unique_rows: Vec<usize>,
    unique_cols: Vec<usize>,
}

impl Dedup {
    fn new(m: &CorrelationMatrix) -> Self {
        let same_row = |a: usize, b: usize| (0..m.cols).all(|j| (m.get(a, j) - m.get(b, j)).abs() <= DEDUP_TOL);
        let same_col = |a: usize, b: usize| (0..m.rows).all(|i| (m.get(i, a) - m.get(i, b)).abs() <= DEDUP_TOL);
        let (unique_rows, row_rep) = classes(m.rows, same_row);
        let (unique_cols, col_rep) = classes(m.cols, same_col);
        Dedup { row_rep, col_rep, unique_rows, unique_cols }
    }
}

fn classes(n: usize, same: impl Fn(usize, usize) -> bool) -> (Vec<usize>, Vec<usize>) {
    let mut unique: Vec<usize> = Vec::new();
    let mut rep = Vec::with_capacity(n);
    for i in 0..n {
        match unique.iter().position(|&u| same(u, i)) {
            Some(k) => rep.push(k),
            None => {
                rep.push(unique.len());
                unique.push(i);
            }
        }
    }
    (unique, rep)
}

fn check_capacity(rows: usize, cols: usize) -> Result<()> {
    if rows * cols > MAX_ENTRIES || rows + cols > MAX_SETTINGS {
        return Err(Error::Capacity(format!(
            "{rows}x{cols} exceeds m_A*m_B <= {MAX_ENTRIES} and m_A+m_B <= {MAX_SETTINGS}"
        )));
    }
    Ok(())
}

/// Maximum of `Σ c_ij s_i t_j` over sign vectors. For fixed `s` the best `t`
/// is `t_j = sign(Σ_i c_ij s_i)`, so only `s` (with `s_0 = +1`) is enumerated.
pub fn lhv_maximum(rows: usize, cols: usize, coefficients: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for v in 0..(1usize << (rows - 1)) {
        let s = |i: usize| if i == 0 || v >> (i - 1) & 1 == 0 { 1.0 } else { -1.0 };
        let value: f64 = (0..cols)
            .map(|j| (0..rows).map(|i| coefficients[i * cols + j] * s(i)).sum::<f64>().abs())
            .sum();
        best = best.max(value);
    }
    best
}

/// Decides whether `target` has an LHV representation.
pub fn lhv_membership(target: &CorrelationMatrix) -> Result<FeasibilityResult> {
    check_capacity(target.rows, target.cols)?;
    let dedup = Dedup::new(target);
    let vertices = Vertices { rows: dedup.unique_rows.len(), cols: dedup.unique_cols.len() };
    let mut rhs: Vec<f64> = dedup
        .unique_rows
        .iter()
        .flat_map(|&i| dedup.unique_cols.iter().map(move |&j| target.get(i, j)))
        .collect();
    rhs.push(1.0);
    let solution = solve_phase_one(&vertices, &rhs)?;

    if solution.objective <= FEASIBLE_OBJECTIVE {
        let mut weights: Vec<WeightedStrategy> = solution
            .primal
            .iter()
            .filter(|(_, w)| *w > 1e-15)
            .map(|&(v, w)| {
                let (s, t) = vertices.strategy(v);
                WeightedStrategy {
                    strategy: DeterministicStrategy {
                        s: dedup.row_rep.iter().map(|&k| s[k]).collect(),
                        t: dedup.col_rep.iter().map(|&k| t[k]).collect(),
                    },
                    weight: w,
                }
            })
            .collect();
        weights.sort_by(|a, b| a.strategy.cmp(&b.strategy));
        let lp_residual = reconstruction_residual(&weights, target);
        if lp_residual > CERTIFICATE_TOL {
            return Err(Error::Numerical {
                message: "primal reconstruction above certificate tolerance".into(),
                estimate: lp_residual,
                tolerance: CERTIFICATE_TOL,
            });
        }
        return Ok(FeasibilityResult {
            rows: target.rows,
            cols: target.cols,
            feasible: true,
            weights: Some(weights),
            violated_functional: None,
            lp_residual,
            lp_iterations: solution.iterations,
        });
    }

    let (ur, uc) = (vertices.rows, vertices.cols);
    let scale = solution.dual[..ur * uc]
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()));
    if !(scale > 0.0) {
        return Err(Error::Numerical {
            message: "degenerate dual certificate".into(),
            estimate: scale,
            tolerance: 0.0,
        });
    }
    let mut coefficients = vec![0.0; target.rows * target.cols];
    for (a, &i) in dedup.unique_rows.iter().enumerate() {
        for (b, &j) in dedup.unique_cols.iter().enumerate() {
            coefficients[i * target.cols + j] = solution.dual[a * uc + b] / scale;
        }
    }
    let bound = lhv_maximum(target.rows, target.cols, &coefficients);
    let functional = LinearFunctional { rows: target.rows, cols: target.cols, coefficients, bound };
    let violation = functional.violation(target);
    if violation <= CERTIFICATE_TOL {
        return Err(Error::Numerical {
            message: "target lies within tolerance of the polytope boundary".into(),
            estimate: violation,
            tolerance: CERTIFICATE_TOL,
        });
    }
    Ok(FeasibilityResult {
        rows: target.rows,
        cols: target.cols,
        feasible: false,
        weights: None,
        violated_functional: Some(functional),
        lp_residual: solution.objective,
        lp_iterations: solution.iterations,
    })
}

fn reconstruction_residual(weights: &[WeightedStrategy], target: &CorrelationMatrix) -> f64 {
    let mut worst = (weights.iter().map(|w| w.weight).sum::<f64>() - 1.0).abs();
    for i in 0..target.rows {
        for j in 0..target.cols {
            let recon: f64 = weights.iter().map(|w| w.weight * w.strategy.entry(i, j)).sum();
            worst = worst.max((recon - target.get(i, j)).abs());
        }
    }
    worst
}

/// Re-checks a certificate against `target` from scratch.
///
/// Feasible: weights are a convex combination of valid strategies that
/// reproduces the target within [`CERTIFICATE_TOL`]. Infeasible: the
/// functional's LHV maximum, recomputed by enumerating every `(s, t)`,
/// matches the declared bound and is exceeded on the target by more than
/// [`CERTIFICATE_TOL`].
pub fn verify_certificate(result: &FeasibilityResult, target: &CorrelationMatrix) -> Result<bool> {
    if (result.rows, result.cols) != (target.rows, target.cols) {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", result.rows, result.cols),
            got: format!("{}x{}", target.rows, target.cols),
        });
    }
    if result.feasible {
        let Some(weights) = &result.weights else { return Ok(false) };
        if weights.is_empty()
            || weights
                .iter()
                .any(|w| !(w.weight >= -1e-12) || !w.strategy.is_valid(target.rows, target.cols))
        {
            return Ok(false);
        }
        Ok(reconstruction_residual(weights, target) <= CERTIFICATE_TOL)
    } else {
        let Some(f) = &result.violated_functional else { return Ok(false) };
        if f.coefficients.len() != target.rows * target.cols {
            return Ok(false);
        }
        let brute = brute_force_maximum(target.rows, target.cols, &f.coefficients);
        if (brute - f.bound).abs() > 1e-9 {
            return Ok(false);
        }
        Ok(f.evaluate(target) - brute > CERTIFICATE_TOL)
    }
}

fn brute_force_maximum(rows: usize, cols: usize, c: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for bits in 0..(1usize << (rows + cols)) {
        let sign = |k: usize| if bits >> k & 1 == 1 { -1.0 } else { 1.0 };
        let mut value = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                value += c[i * cols + j] * sign(i) * sign(rows + j);
            }
        }
        best = best.max(value);
    }
    best
}

/// Outcome of the bisection for the critical visibility.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalVisibility {
    pub g_star: f64,
    /// Largest g certified feasible.
    pub lower: f64,
    /// Smallest g certified infeasible (1 if g = 1 is feasible).
    pub upper: f64,
    pub iterations: usize,
    /// Every LP verdict of the bisection passed [`verify_certificate`].
    pub certificates_verified: bool,
}

/// Bisects `g ∈ [0, 1]` with [`lhv_membership`] of `target_matrix(g, angles)`.
pub fn bisect_critical_g(angles: &AngleSet, tol: f64) -> Result<CriticalVisibility> {
    if !(tol >= 1e-6) {
        return Err(Error::Domain { what: "tol", value: tol, domain: "tol >= 1e-6" });
    }
    check_capacity(angles.alphas().len(), angles.betas().len())?;
    let mut verified = true;
    let verdict = |g: f64, verified: &mut bool| -> Result<Option<bool>> {
        let target = target_matrix(g, angles)?;
        match lhv_membership(&target) {
            Ok(r) => {
                *verified &= verify_certificate(&r, &target)?;
                Ok(Some(r.feasible))
            }
            Err(Error::Numerical { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    if verdict(1.0, &mut verified)? != Some(false) {
        return Ok(CriticalVisibility {
            g_star: 1.0,
            lower: 1.0,
            upper: 1.0,
            iterations: 0,
            certificates_verified: verified,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut iterations = 0;
    while iterations < BISECTION_ITERATIONS && hi - lo > tol {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        match verdict(mid, &mut verified)? {
            Some(true) => lo = mid,
            Some(false) => hi = mid,
            None => {
                // numerically on the boundary
                lo = mid;
                hi = mid;
            }
        }
    }
    Ok(CriticalVisibility {
        g_star: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        iterations,
        certificates_verified: verified,
    })
}

pub fn critical_g(angles: &AngleSet, tol: f64) -> Result<f64> {
    bisect_critical_g(angles, tol).map(|c| c.g_star)
}
