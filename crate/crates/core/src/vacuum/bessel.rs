//! Modified Bessel functions of the second kind, orders 0 and 1.
//!
//! Power series for `x ≤ 2`; above that Steed's continued fraction for the
//! ratio `K₁/K₀` (Temme's CF2 with the normalizing sum), which converges in a
//! few dozen terms and keeps full double precision where the asymptotic
//! series stalls.

use std::f64::consts::PI;

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_SPLIT: f64 = 2.0;

fn check(x: f64) -> Result<()> {
    if !(x > 0.0) || x.is_nan() {
        return Err(Error::Domain { what: "x", value: x, domain: "(0, ∞)" });
    }
    Ok(())
}

/// `K₀(x)` for `x > 0`.
pub fn bessel_k0(x: f64) -> Result<f64> {
    check(x)?;
    Ok(if x <= SERIES_SPLIT { series(x).0 } else { steed(x).0 })
}

/// `K₁(x)` for `x > 0`.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check(x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(if x <= SERIES_SPLIT { series(x).1 } else { steed(x).1 })
}

/// Leading large-argument form `√(π/2x) e^{−x}`, shared by `K₀` and `K₁`.
pub fn bessel_k_asymptotic(x: f64) -> f64 {
    (PI / (2.0 * x)).sqrt() * (-x).exp()
}

fn series(x: f64) -> (f64, f64) {
    let y = 0.25 * x * x;
    let log_half = (0.5 * x).ln();
    // I0, I1 and the digamma-weighted companions, summed in one pass.
    let mut term0 = 1.0; // y^k / (k!)^2
    let mut term1 = 1.0; // y^k / (k! (k+1)!)
    let mut harmonic = 0.0; // H_k
    let (mut i0, mut i1, mut s0, mut s1) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..60 {
        let kf = k as f64;
        if k > 0 {
            term0 *= y / (kf * kf);
            term1 *= y / (kf * (kf + 1.0));
            harmonic += 1.0 / kf;
        }
        let h_next = harmonic + 1.0 / (kf + 1.0);
        i0 += term0;
        i1 += term1;
        s0 += term0 * harmonic;
        s1 += term1 * (harmonic + h_next - 2.0 * EULER_GAMMA);
        if term0 < 1e-18 * i0 && term1 < 1e-18 * i1 {
            break;
        }
    }
    let k0 = -(log_half + EULER_GAMMA) * i0 + s0;
    let k1 = 1.0 / x + log_half * 0.5 * x * i1 - 0.25 * x * s1;
    (k0, k1)
}

fn steed(x: f64) -> (f64, f64) {
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..10_000 {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-17 {
            break;
        }
    }
    h *= a1;
    let k0 = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k1 = k0 * (x + 0.5 - h) / x;
    (k0, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from the integral representation, 20 digits.
    const K1_TABLE: [(f64, f64); 5] = [
        (0.1, 9.853_844_780_870_606),
        (1.0, 0.601_907_230_197_234_6),
        (2.0, 0.139_865_881_816_522_4),
        (2.5, 0.073_890_816_347_747_06),
        (10.0, 1.864_877_345_382_558_5e-5),
    ];

    #[test]
    fn k1_reference_values() {
        for (x, want) in K1_TABLE {
            let got = bessel_k1(x).unwrap();
            assert!(((got - want) / want).abs() < 1e-13, "K1({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn branches_join_at_split() {
        let below = series(SERIES_SPLIT);
        let above = steed(SERIES_SPLIT);
        assert!(((below.0 - above.0) / above.0).abs() < 1e-14);
        assert!(((below.1 - above.1) / above.1).abs() < 1e-14);
    }

    #[test]
    fn small_argument_limit() {
        for x in [1e-3, 1e-6, 1e-9] {
            assert!((x * bessel_k1(x).unwrap() - 1.0).abs() < 10.0 * x);
        }
    }

    #[test]
    fn domain() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k0(f64::NAN).is_err());
    }
}
