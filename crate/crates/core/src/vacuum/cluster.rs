//! Cluster decomposition for polynomial states `ψ = C|0⟩`.
//!
//! With `ω(X) = ⟨0|C* X C|0⟩ / ⟨0|C* C|0⟩` the connected residual
//! `ω(A(l)B) − ω(A(l))ω(B)` and the vacuum drift `ω(A(l)) − ⟨0|A(l)|0⟩`
//! both vanish as the support of `A` is translated away.

use nalgebra::{DMatrix, DVector};

use super::wick::{crossing_pairing_sum, pairing_sum, MAX_FIELDS};
use super::{covariance_matrix, MassParam, SmearedField};
use crate::{Error, Result};

/// Ordered product `φ(f₁) ⋯ φ(f_k)` of real smeared fields.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WickMonomial {
    factors: Vec<SmearedField>,
}

impl WickMonomial {
    pub fn new(factors: Vec<SmearedField>) -> Result<Self> {
        if factors.len() > MAX_FIELDS {
            return Err(Error::Capacity(format!("monomial degree {} exceeds {MAX_FIELDS}", factors.len())));
        }
        Ok(WickMonomial { factors })
    }

    pub fn identity() -> Self {
        WickMonomial::default()
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn factors(&self) -> &[SmearedField] {
        &self.factors
    }

    pub fn translated(&self, l: &[f64; 3]) -> Self {
        WickMonomial { factors: self.factors.iter().map(|f| f.translated(l)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterResidual {
    /// `ω(A(l)B) − ω(A(l))ω(B)`.
    pub connected: f64,
    /// `ω(A(l)) − ⟨0|A(l)|0⟩`.
    pub second_limit: f64,
    pub omega_ab: f64,
    pub omega_a: f64,
    pub omega_b: f64,
    pub vacuum_a: f64,
}

/// Cluster residuals for the state `C|0⟩` with `A` translated by `l`.
pub fn cluster_residual(
    a: &WickMonomial,
    b: &WickMonomial,
    c: &WickMonomial,
    l: &[f64; 3],
    m: MassParam,
) -> Result<ClusterResidual> {
    let total = 2 * c.degree() + a.degree() + b.degree();
    if total > MAX_FIELDS {
        return Err(Error::Capacity(format!(
            "2·deg C + deg A + deg B = {total} exceeds {MAX_FIELDS}"
        )));
    }
    let a_l = a.translated(l);
    let fields: Vec<SmearedField> = c.factors.iter().chain(&a_l.factors).chain(&b.factors).copied().collect();
    let cov = covariance_matrix(&fields, m)?;
    let c_idx: Vec<usize> = (0..c.degree()).collect();
    let a_idx: Vec<usize> = (c.degree()..c.degree() + a.degree()).collect();
    let b_idx: Vec<usize> = (c.degree() + a.degree()..fields.len()).collect();

    // Contractions inside `C* X C`, in full or restricted to those linking
    // A to the rest; see `crossing_pairing_sum`.
    let sequence = |inner: &[&[usize]]| -> Vec<usize> {
        let mut seq: Vec<usize> = c_idx.iter().rev().copied().collect();
        for part in inner {
            seq.extend_from_slice(part);
        }
        seq.extend_from_slice(&c_idx);
        seq
    };
    let expect = |inner: &[&[usize]]| -> f64 {
        let seq = sequence(inner);
        pairing_sum(seq.len(), |i, j| cov.get(seq[i], seq[j])).re
    };
    let crossing = |inner: &[&[usize]]| -> f64 {
        let seq = sequence(inner);
        let marked: Vec<bool> = seq.iter().map(|i| a_idx.contains(i)).collect();
        crossing_pairing_sum(&marked, |i, j| cov.get(seq[i], seq[j])).re
    };
    let norm = expect(&[]);
    if !(norm > 0.0) {
        return Err(Error::Numerical {
            message: "state C|0⟩ has non-positive norm".into(),
            estimate: norm,
            tolerance: 0.0,
        });
    }
    let omega_ab = expect(&[&a_idx, &b_idx]) / norm;
    let omega_a = expect(&[&a_idx]) / norm;
    let omega_b = expect(&[&b_idx]) / norm;
    let vacuum_a = pairing_sum(a_idx.len(), |i, j| cov.get(a_idx[i], a_idx[j])).re;
    // ω(AB) = ⟨A⟩ω(B) + X_AB/N and ω(A) = ⟨A⟩ + X_A/N, so the ⟨A⟩ terms
    // cancel exactly in the connected residual.
    let x_ab = crossing(&[&a_idx, &b_idx]) / norm;
    let x_a = crossing(&[&a_idx]) / norm;
    Ok(ClusterResidual {
        connected: x_ab - x_a * omega_b,
        second_limit: x_a,
        omega_ab,
        omega_a,
        omega_b,
        vacuum_a,
    })
}

/// [`cluster_residual`] along `direction` at each distance.
pub fn cluster_decay_sweep(
    a: &WickMonomial,
    b: &WickMonomial,
    c: &WickMonomial,
    direction: &[f64; 3],
    distances: &[f64],
    m: MassParam,
) -> Result<Vec<(f64, ClusterResidual)>> {
    let n = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::validation("sweep direction must be a nonzero finite vector"));
    }
    distances
        .iter()
        .map(|&d| {
            let l = std::array::from_fn(|k| d * direction[k] / n);
            Ok((d, cluster_residual(a, b, c, &l, m)?))
        })
        .collect()
}

/// Least-squares fit of `ln|y| = c − κ s − p ln s`, with the plain
/// two-parameter slope `ln|y| = c − κ s` alongside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub power: f64,
    pub intercept: f64,
    pub plain_rate: f64,
    pub plain_intercept: f64,
}

pub fn fit_decay(s: &[f64], y: &[f64]) -> Result<DecayFit> {
    if s.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: format!("{} values", s.len()), got: format!("{}", y.len()) });
    }
    if s.len() < 3 {
        return Err(Error::validation("a decay fit needs at least 3 points"));
    }
    if s.iter().any(|&v| !(v > 0.0)) || y.iter().any(|&v| v == 0.0 || !v.is_finite()) {
        return Err(Error::validation("decay fit needs s > 0 and finite nonzero y"));
    }
    let n = s.len();
    let rhs = DVector::from_iterator(n, y.iter().map(|v| v.abs().ln()));
    let full = DMatrix::from_fn(n, 3, |i, j| match j {
        0 => 1.0,
        1 => -s[i],
        _ => -s[i].ln(),
    });
    let plain = full.columns(0, 2).into_owned();
    let solve = |x: DMatrix<f64>| {
        x.svd(true, true)
            .solve(&rhs, 1e-14)
            .map_err(|e| Error::Numerical { message: format!("decay fit: {e}"), estimate: f64::NAN, tolerance: 1e-14 })
    };
    let p = solve(full)?;
    let q = solve(plain)?;
    Ok(DecayFit { rate: p[1], power: p[2], intercept: p[0], plain_rate: q[1], plain_intercept: q[0] })
}

/// `(distance, residual)` columns of a sweep, connected or second limit.
pub fn residual_series(sweep: &[(f64, ClusterResidual)], second: bool) -> (Vec<f64>, Vec<f64>) {
    sweep
        .iter()
        .map(|(d, r)| (*d, if second { r.second_limit } else { r.connected }))
        .unzip()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::vacuum::{smeared_covariance, SpacetimePoint};

    fn field(x: f64) -> SmearedField {
        SmearedField::new(SpacetimePoint::at_rest([x, 0.0, 0.0]), 0.3).unwrap()
    }

    #[test]
    fn vacuum_state_residual_is_covariance() {
        let m = MassParam::new(1.0).unwrap();
        let a = WickMonomial::new(vec![field(0.0)]).unwrap();
        let l = [3.0, 0.0, 0.0];
        let r = cluster_residual(&a, &a, &WickMonomial::identity(), &l, m).unwrap();
        let w = smeared_covariance(&field(3.0), &field(0.0), m).unwrap().re;
        assert!((r.connected - w).abs() < 1e-15);
        assert_eq!(r.second_limit, 0.0);
    }

    #[test]
    fn zero_translation_baseline() {
        let m = MassParam::new(1.0).unwrap();
        let a = WickMonomial::new(vec![field(0.0)]).unwrap();
        let c = WickMonomial::new(vec![field(0.5)]).unwrap();
        let r = cluster_residual(&a, &a, &c, &[0.0; 3], m).unwrap();
        assert!(r.connected > 0.0);
        let direct = r.omega_ab - r.omega_a * r.omega_b;
        assert!((r.connected - direct).abs() < 1e-14 * direct.abs());
    }

    #[test]
    fn residuals_agree_with_direct_subtraction() {
        let m = MassParam::new(1.0).unwrap();
        let a = WickMonomial::new(vec![field(0.0), field(0.2)]).unwrap();
        let b = WickMonomial::new(vec![field(-0.3), field(0.1)]).unwrap();
        let c = WickMonomial::new(vec![field(0.4)]).unwrap();
        let r = cluster_residual(&a, &b, &WickMonomial::identity(), &[1.0, 0.5, 0.0], m).unwrap();
        let direct = r.omega_ab - r.omega_a * r.omega_b;
        assert!((r.connected - direct).abs() < 1e-12 * direct.abs());
        let r = cluster_residual(&a, &WickMonomial::identity(), &c, &[1.0, 0.0, 0.0], m).unwrap();
        let direct = r.omega_a - r.vacuum_a;
        assert!((r.second_limit - direct).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn degree_cap() {
        let m = MassParam::new(1.0).unwrap();
        let two = WickMonomial::new(vec![field(0.0), field(1.0)]).unwrap();
        assert!(matches!(cluster_residual(&two, &two, &two, &[0.0; 3], m), Err(Error::Capacity(_))));
        assert!(WickMonomial::new(vec![field(0.0); 7]).is_err());
    }

    #[test]
    fn fit_recovers_synthetic_rate() {
        let s: Vec<f64> = (1..9).map(|i| 2.0 * i as f64).collect();
        let y: Vec<f64> = s.iter().map(|&x| 3.0 * x.powf(-1.5) * (-0.8 * x).exp()).collect();
        let fit = fit_decay(&s, &y).unwrap();
        assert!((fit.rate - 0.8).abs() < 1e-10);
        assert!((fit.power - 1.5).abs() < 1e-9);
        assert!(fit.plain_rate > 0.8);
    }
}
