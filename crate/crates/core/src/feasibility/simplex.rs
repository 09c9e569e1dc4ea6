//! Phase-I revised simplex over implicitly generated columns.
//!
//! Solves `min Σ a` s.t. `A w + a = b` (rows sign-flipped so `b ≥ 0`),
//! `w, a ≥ 0`. The basis is refactored with a dense LU on every iteration;
//! row counts here never exceed 26.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::{Error, Result};

const PRICING_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 100_000;
const DEGENERATE_STREAK_FOR_BLAND: usize = 50;
const PARALLEL_PRICING_THRESHOLD: usize = 4096;

pub(crate) trait ColumnSource: Sync {
    fn n_rows(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn column(&self, j: usize, out: &mut [f64]);
    /// `yᵀ A_j` for the unflipped column.
    fn dot(&self, j: usize, y: &[f64]) -> f64;
}

#[derive(Debug, Clone)]
pub(crate) struct PhaseOneSolution {
    pub objective: f64,
    /// `(column, value)` for basic structural columns.
    pub primal: Vec<(usize, f64)>,
    /// Optimal dual vector in the original (unflipped) row signs. At
    /// optimality `yᵀ A_j ≤ tol` for every column and `yᵀ b = objective`.
    pub dual: Vec<f64>,
    pub iterations: usize,
}

pub(crate) fn solve_phase_one<S: ColumnSource>(src: &S, b: &[f64]) -> Result<PhaseOneSolution> {
    let m = src.n_rows();
    let n = src.n_cols();
    assert_eq!(b.len(), m);
    let sign: Vec<f64> = b.iter().map(|&v| if v < 0.0 { -1.0 } else { 1.0 }).collect();
    let rhs = DVector::from_iterator(m, b.iter().zip(&sign).map(|(v, s)| v * s));

    // Basis entries >= n are artificials (row = entry - n).
    let mut basis: Vec<usize> = (n..n + m).collect();
    let mut col = vec![0.0; m];
    let mut bland = false;
    let mut degenerate_streak = 0usize;

    let flipped_column = |j: usize, col: &mut [f64]| {
        if j >= n {
            col.iter_mut().for_each(|c| *c = 0.0);
            col[j - n] = 1.0;
        } else {
            src.column(j, col);
            for (c, s) in col.iter_mut().zip(&sign) {
                *c *= s;
            }
        }
    };

    for iteration in 0..MAX_ITERATIONS {
        let mut basis_matrix = DMatrix::<f64>::zeros(m, m);
        for (k, &j) in basis.iter().enumerate() {
            flipped_column(j, &mut col);
            for r in 0..m {
                basis_matrix[(r, k)] = col[r];
            }
        }
        let lu = basis_matrix.clone().lu();
        let x = lu.solve(&rhs).ok_or_else(singular)?;
        let cost = DVector::from_iterator(m, basis.iter().map(|&j| if j >= n { 1.0 } else { 0.0 }));
        let y_flipped = basis_matrix.transpose().lu().solve(&cost).ok_or_else(singular)?;
        let y: Vec<f64> = y_flipped.iter().zip(&sign).map(|(v, s)| v * s).collect();

        let reduced = |j: usize| -src.dot(j, &y);
        let entering = if bland {
            if n >= PARALLEL_PRICING_THRESHOLD {
                (0..n).into_par_iter().position_first(|j| reduced(j) < -PRICING_TOL)
            } else {
                (0..n).position(|j| reduced(j) < -PRICING_TOL)
            }
        } else {
            let best = if n >= PARALLEL_PRICING_THRESHOLD {
                (0..n)
                    .into_par_iter()
                    .map(|j| (reduced(j), j))
                    .reduce(|| (f64::INFINITY, usize::MAX), min_with_index)
            } else {
                (0..n).map(|j| (reduced(j), j)).fold((f64::INFINITY, usize::MAX), min_with_index)
            };
            (best.0 < -PRICING_TOL).then_some(best.1)
        };

        let Some(entering) = entering else {
            let objective = basis
                .iter()
                .zip(x.iter())
                .filter(|(&j, _)| j >= n)
                .map(|(_, &v)| v)
                .sum::<f64>();
            let primal = basis
                .iter()
                .zip(x.iter())
                .filter(|(&j, _)| j < n)
                .map(|(&j, &v)| (j, v))
                .collect();
            return Ok(PhaseOneSolution { objective, primal, dual: y, iterations: iteration });
        };

        flipped_column(entering, &mut col);
        let dir = lu.solve(&DVector::from_column_slice(&col)).ok_or_else(singular)?;
        let mut leave: Option<(usize, f64)> = None;
        for r in 0..m {
            if dir[r] > PIVOT_TOL {
                let ratio = x[r].max(0.0) / dir[r];
                leave = match leave {
                    None => Some((r, ratio)),
                    Some((lr, lratio)) => {
                        let better = ratio < lratio - 1e-15
                            || (ratio <= lratio + 1e-15 && prefer(basis[r], basis[lr], n));
                        if better { Some((r, ratio)) } else { Some((lr, lratio)) }
                    }
                };
            }
        }
        let Some((leave_row, step)) = leave else {
            return Err(Error::Numerical {
                message: "phase-one LP reported unbounded direction".into(),
                estimate: 0.0,
                tolerance: PIVOT_TOL,
            });
        };
        if step <= 1e-14 {
            degenerate_streak += 1;
            if degenerate_streak > DEGENERATE_STREAK_FOR_BLAND {
                bland = true;
            }
        } else {
            degenerate_streak = 0;
        }
        basis[leave_row] = entering;
    }
    Err(Error::Numerical {
        message: "simplex iteration limit reached".into(),
        estimate: MAX_ITERATIONS as f64,
        tolerance: MAX_ITERATIONS as f64,
    })
}

fn min_with_index(a: (f64, usize), b: (f64, usize)) -> (f64, usize) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Tie-break for the leaving variable: artificials first, then lowest index.
fn prefer(candidate: usize, current: usize, n: usize) -> bool {
    match (candidate >= n, current >= n) {
        (true, false) => true,
        (false, true) => false,
        _ => candidate < current,
    }
}

fn singular() -> Error {
    Error::Numerical {
        message: "singular simplex basis".into(),
        estimate: 0.0,
        tolerance: 0.0,
    }
}
