//! Wick contractions for Gaussian (free) fields.

use num_complex::Complex64;

use super::{covariance_matrix, MassParam, SmearedField};
use crate::{Error, Result};

/// Largest number of fields in a single product.
pub const MAX_FIELDS: usize = 6;

fn capacity(n: usize) -> Result<()> {
    if n > MAX_FIELDS {
        return Err(Error::Capacity(format!("{n} fields in a Wick product, at most {MAX_FIELDS} supported")));
    }
    Ok(())
}

/// Sum over perfect matchings of `{0, …, n−1}` of `Π pair(i, j)` with
/// `i < j` inside each pair. Zero for odd `n`, one for `n = 0`.
pub fn pairing_sum<F: FnMut(usize, usize) -> Complex64>(n: usize, mut pair: F) -> Complex64 {
    fn rec<F: FnMut(usize, usize) -> Complex64>(free: &mut Vec<usize>, pair: &mut F) -> Complex64 {
        if free.is_empty() {
            return Complex64::new(1.0, 0.0);
        }
        let first = free.remove(0);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            total += pair(first, partner) * rec(free, pair);
            free.insert(k, partner);
        }
        free.insert(0, first);
        total
    }
    if n % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut free: Vec<usize> = (0..n).collect();
    rec(&mut free, &mut pair)
}

/// Like [`pairing_sum`] but keeps only matchings with at least one pair
/// joining a `marked` index to an unmarked one. Subtracting this from the full
/// sum leaves the factorized part, so decaying residuals are obtained without
/// cancellation.
pub fn crossing_pairing_sum<F: FnMut(usize, usize) -> Complex64>(marked: &[bool], mut pair: F) -> Complex64 {
    fn rec<F: FnMut(usize, usize) -> Complex64>(
        free: &mut Vec<usize>,
        marked: &[bool],
        crossed: bool,
        pair: &mut F,
    ) -> Complex64 {
        if free.is_empty() {
            return Complex64::new(if crossed { 1.0 } else { 0.0 }, 0.0);
        }
        let first = free.remove(0);
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..free.len() {
            let partner = free.remove(k);
            let c = crossed || marked[first] != marked[partner];
            total += pair(first, partner) * rec(free, marked, c, pair);
            free.insert(k, partner);
        }
        free.insert(0, first);
        total
    }
    if marked.len() % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let mut free: Vec<usize> = (0..marked.len()).collect();
    rec(&mut free, marked, false, &mut pair)
}

/// Sum over permutations `π` of `Π_i pair(i, π(i))`: the contraction sum when
/// only `φ`–`φ*` pairs contribute.
pub fn bipartite_sum<F: FnMut(usize, usize) -> Complex64>(n: usize, mut pair: F) -> Complex64 {
    fn rec<F: FnMut(usize, usize) -> Complex64>(i: usize, used: &mut [bool], pair: &mut F) -> Complex64 {
        if i == used.len() {
            return Complex64::new(1.0, 0.0);
        }
        let mut total = Complex64::new(0.0, 0.0);
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                total += pair(i, j) * rec(i + 1, used, pair);
                used[j] = false;
            }
        }
        total
    }
    rec(0, &mut vec![false; n], &mut pair)
}

/// `⟨0| φ(f₁) ⋯ φ(f_n) |0⟩` for the real free field.
pub fn wick_npoint(fields: &[SmearedField], m: MassParam) -> Result<Complex64> {
    capacity(fields.len())?;
    if fields.len() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let cov = covariance_matrix(fields, m)?;
    Ok(pairing_sum(fields.len(), |i, j| cov.get(i, j)))
}

/// `⟨0| φ(f₁) ⋯ φ(f_p) φ*(g₁) ⋯ φ*(g_q) |0⟩` for the complex free field
/// `φ = (φ₁ + iφ₂)/√2`. Only `φ–φ*` contractions survive, so the value is
/// zero unless `p = q`.
pub fn wick_npoint_complex(fields: &[SmearedField], conjugates: &[SmearedField], m: MassParam) -> Result<Complex64> {
    capacity(fields.len() + conjugates.len())?;
    if fields.len() != conjugates.len() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let all: Vec<SmearedField> = fields.iter().chain(conjugates).copied().collect();
    let cov = covariance_matrix(&all, m)?;
    let p = fields.len();
    Ok(bipartite_sum(p, |i, j| cov.get(i, p + j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vacuum::{smeared_covariance, SpacetimePoint};

    fn fields(n: usize) -> Vec<SmearedField> {
        (0..n)
            .map(|i| {
                let x = i as f64;
                SmearedField::new(SpacetimePoint::at_rest([0.7 * x, 0.3 * x * x, -0.2 * x]), 0.2 + 0.05 * x).unwrap()
            })
            .collect()
    }

    #[test]
    fn pairing_counts() {
        let one = |_: usize, _: usize| Complex64::new(1.0, 0.0);
        assert_eq!(pairing_sum(0, one).re, 1.0);
        assert_eq!(pairing_sum(2, one).re, 1.0);
        assert_eq!(pairing_sum(3, one).re, 0.0);
        assert_eq!(pairing_sum(4, one).re, 3.0);
        assert_eq!(pairing_sum(6, one).re, 15.0);
        assert_eq!(bipartite_sum(3, one).re, 6.0);
        // 15 matchings of 6, of which 3 · 1 keep {0, 1} internal
        let marked = [true, true, false, false, false, false];
        assert_eq!(crossing_pairing_sum(&marked, one).re, 12.0);
    }

    #[test]
    fn low_order_examples() {
        let m = MassParam::new(1.0).unwrap();
        let f = fields(4);
        let two = wick_npoint(&f[..2], m).unwrap();
        assert_eq!(two, smeared_covariance(&f[0], &f[1], m).unwrap());
        assert_eq!(wick_npoint(&f[..3], m).unwrap(), Complex64::new(0.0, 0.0));
        let w = |i: usize, j: usize| smeared_covariance(&f[i], &f[j], m).unwrap();
        let four = wick_npoint(&f, m).unwrap();
        let by_hand = w(0, 1) * w(2, 3) + w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((four - by_hand).norm() < 1e-15 * by_hand.norm());
    }

    #[test]
    fn capacity_and_charge() {
        let m = MassParam::new(1.0).unwrap();
        let f = fields(7);
        assert!(matches!(wick_npoint(&f, m), Err(Error::Capacity(_))));
        assert_eq!(wick_npoint_complex(&f[..2], &f[2..3], m).unwrap(), Complex64::new(0.0, 0.0));
        let two = wick_npoint_complex(&f[..1], &f[1..2], m).unwrap();
        assert_eq!(two, smeared_covariance(&f[0], &f[1], m).unwrap());
        assert!(matches!(wick_npoint_complex(&f[..4], &f[4..7], m), Err(Error::Capacity(_))));
    }
}
