//! Log-gamma and the log-binomial family.
//!
//! `ln Γ` is evaluated piecewise: a Taylor series about 1 and 2 on
//! `[0.5, 2.5)` so the roots at 1 and 2 keep full relative accuracy, upward
//! recurrence into the Stirling region on `[2.5, 10)`, and the Stirling
//! series with eight correction terms from 10 on.

use std::sync::OnceLock;

use crate::error::{domain, usage, Result};

/// `ln √(2π)`.
pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const STIRLING_THRESHOLD: f64 = 10.0;

/// Number of `ζ(n) - 1` coefficients used by the series near 1 and 2.
const ZETA_TERMS: usize = 30;

/// `ζ(n) - 1` for `n = 2..ZETA_TERMS+2`, by direct summation to 49 and an
/// Euler-Maclaurin tail from 50.
fn zeta_minus_one() -> &'static [f64; ZETA_TERMS] {
    static TABLE: OnceLock<[f64; ZETA_TERMS]> = OnceLock::new();
    TABLE.get_or_init(|| {
        const K: f64 = 50.0;
        let mut out = [0.0; ZETA_TERMS];
        for (i, slot) in out.iter_mut().enumerate() {
            let n = (i + 2) as f64;
            let tail = K.powf(1.0 - n) / (n - 1.0) + 0.5 * K.powf(-n) + n / 12.0 * K.powf(-n - 1.0)
                - n * (n + 1.0) * (n + 2.0) / 720.0 * K.powf(-n - 3.0)
                + n * (n + 1.0) * (n + 2.0) * (n + 3.0) * (n + 4.0) / 30240.0 * K.powf(-n - 5.0);
            let head: f64 = (2..50).rev().map(|k| (k as f64).powf(-n)).sum();
            *slot = head + tail;
        }
        out
    })
}

/// `ln Γ(2 + z)` for `|z| <= 1/2`.
fn lgamma_near_two(z: f64) -> f64 {
    let zeta = zeta_minus_one();
    let mut sum = 0.0;
    let mut power = z;
    let mut terms = [0.0; ZETA_TERMS];
    for (i, t) in terms.iter_mut().enumerate() {
        power *= z;
        let n = (i + 2) as f64;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        *t = sign * zeta[i] * power / n;
    }
    // smallest terms first
    for t in terms.iter().rev() {
        sum += t;
    }
    z * (1.0 - EULER_GAMMA) + sum
}

/// Stirling correction `ln Γ(x) - [(x - 1/2) ln x - x + ln √(2π)]` for
/// `x >= 10`.
fn stirling_series(x: f64) -> f64 {
    const COEFFS: [f64; 8] = [
        1.0 / 12.0,
        -1.0 / 360.0,
        1.0 / 1260.0,
        -1.0 / 1680.0,
        1.0 / 1188.0,
        -691.0 / 360_360.0,
        1.0 / 156.0,
        -3617.0 / 122_400.0,
    ];
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut acc = 0.0;
    for c in COEFFS.iter().rev() {
        acc = acc * inv2 + c;
    }
    acc * inv
}

fn lgamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        lgamma_pos(x + 1.0) - x.ln()
    } else if x < 1.5 {
        let z = x - 1.0;
        lgamma_near_two(z) - z.ln_1p()
    } else if x < 2.5 {
        lgamma_near_two(x - 2.0)
    } else if x < STIRLING_THRESHOLD {
        let mut y = x;
        let mut prod = 1.0;
        while y < STIRLING_THRESHOLD {
            prod *= y;
            y += 1.0;
        }
        lgamma_pos(y) - prod.ln()
    } else {
        (x - 0.5) * x.ln() - x + LN_SQRT_2PI + stirling_series(x)
    }
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!("log_gamma requires a finite x > 0, got {x}")));
    }
    Ok(lgamma_pos(x))
}

/// `ln Γ(x + 1) - [(x + 1/2) ln x - x + ln √(2π)]`, the remainder of
/// Stirling's formula for `x!`.
fn stirlerr(x: f64) -> f64 {
    if x >= STIRLING_THRESHOLD {
        stirling_series(x)
    } else {
        lgamma_pos(x + 1.0) - (x + 0.5) * x.ln() + x - LN_SQRT_2PI
    }
}

/// `ln [Γ(b + c + 1) / (Γ(b + 1) Γ(c + 1))]` for real `b, c >= 0`, the
/// logarithm of the generalized binomial coefficient `C(b + c, b)`.
///
/// The leading Stirling terms are combined analytically so the result keeps
/// its relative accuracy even when it is many orders of magnitude smaller
/// than the individual `ln Γ` values.
pub fn log_gamma_binomial(b: f64, c: f64) -> Result<f64> {
    if !(b >= 0.0) || !(c >= 0.0) || !b.is_finite() || !c.is_finite() {
        return Err(domain(format!(
            "log_gamma_binomial requires finite b, c >= 0, got ({b}, {c})"
        )));
    }
    if b == 0.0 || c == 0.0 {
        return Ok(0.0);
    }
    let a = b + c;
    let ln_a_over_b = (c / b).ln_1p();
    let ln_a_over_c = (b / c).ln_1p();
    let main = b * ln_a_over_b + c * ln_a_over_c + 0.5 * (ln_a_over_b - c.ln()) - LN_SQRT_2PI;
    Ok(main + stirlerr(a) - stirlerr(b) - stirlerr(c))
}

/// `ln C(a, b)`.
pub fn log_binomial(a: u64, b: u64) -> Result<f64> {
    if b > a {
        return Err(usage(format!("log_binomial requires b <= a, got ({a}, {b})")));
    }
    log_gamma_binomial(b as f64, (a - b) as f64)
}

/// `ln ν_d` with `ν_d = (2/d) π^{d/2} / Γ(d/2)` the volume of the unit ball
/// in `d` dimensions.
pub fn log_unit_ball_volume(d: u64) -> Result<f64> {
    if d == 0 {
        return Err(usage("unit ball dimension must be at least 1"));
    }
    let d = d as f64;
    Ok(std::f64::consts::LN_2 - d.ln() + 0.5 * d * std::f64::consts::PI.ln() - lgamma_pos(0.5 * d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        if a == b {
            0.0
        } else {
            (a - b).abs() / b.abs()
        }
    }

    #[test]
    fn gamma_examples() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-16);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-16);
        let half = 0.5 * std::f64::consts::PI.ln();
        assert!(rel(log_gamma(0.5).unwrap(), half) < 1e-14);
        // 9! = 362880
        assert!(rel(log_gamma(10.0).unwrap(), 362_880f64.ln()) < 1e-14);
    }

    #[test]
    fn gamma_integer_factorials() {
        let mut fact = 1.0f64;
        for n in 1..=170u32 {
            // Γ(n+1) = n!
            fact *= n as f64;
            let got = log_gamma(n as f64 + 1.0).unwrap();
            assert!(rel(got, fact.ln()) < 1e-13, "n={n}: {got} vs {}", fact.ln());
        }
    }

    #[test]
    fn gamma_half_integers() {
        // Γ(n + 1/2) = (2n)! √π / (4^n n!)
        let mut val = std::f64::consts::PI.sqrt();
        for n in 1..60u32 {
            val *= n as f64 - 0.5;
            let got = log_gamma(n as f64 + 0.5).unwrap();
            assert!(rel(got, val.ln()) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn gamma_near_roots_keeps_relative_accuracy() {
        // ln Γ(1 + z) ≈ -γ z + (π²/12) z² for small z
        for &z0 in &[1e-6, -1e-6, 1e-9] {
            let x = 1.0 + z0;
            let z = x - 1.0;
            let expected = -EULER_GAMMA * z + std::f64::consts::PI.powi(2) / 12.0 * z * z
                - 1.202_056_903_159_594_2 / 3.0 * z * z * z;
            assert!(rel(log_gamma(x).unwrap(), expected) < 1e-12);
        }
    }

    #[test]
    fn zeta_table_known_values() {
        let z = zeta_minus_one();
        let pi = std::f64::consts::PI;
        assert!(rel(z[0], pi * pi / 6.0 - 1.0) < 1e-14);
        assert!(rel(z[2], pi.powi(4) / 90.0 - 1.0) < 1e-14);
    }

    #[test]
    fn gamma_domain_errors() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn binomial_examples() {
        assert!(rel(log_binomial(7, 4).unwrap(), 35f64.ln()) < 1e-14);
        assert_eq!(log_binomial(12, 0).unwrap(), 0.0);
        assert!(matches!(log_binomial(3, 4), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn binomial_one_at_large_a() {
        // ln C(a, 1) = ln a: plain ln Γ differences lose ~5 digits here
        for a in [1000u64, 54_321, 100_000] {
            assert!(rel(log_binomial(a, 1).unwrap(), (a as f64).ln()) < 1e-13);
        }
    }

    #[test]
    fn unit_ball_volumes() {
        let pi = std::f64::consts::PI;
        assert!(rel(log_unit_ball_volume(1).unwrap(), 2f64.ln()) < 1e-15);
        assert!(rel(log_unit_ball_volume(2).unwrap(), pi.ln()) < 1e-15);
        assert!(rel(log_unit_ball_volume(3).unwrap(), (4.0 * pi / 3.0).ln()) < 1e-15);
        assert!(log_unit_ball_volume(0).is_err());
    }

    proptest! {
        #[test]
        fn gamma_recurrence(x in 0.5f64..1000.0) {
            let lhs = log_gamma(x + 1.0).unwrap();
            let rhs = log_gamma(x).unwrap() + x.ln();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "x={} {} {}", x, lhs, rhs);
        }

        #[test]
        fn gamma_binomial_symmetric(b in 0.0f64..500.0, c in 0.0f64..500.0) {
            let l = log_gamma_binomial(b, c).unwrap();
            let r = log_gamma_binomial(c, b).unwrap();
            prop_assert!((l - r).abs() <= 1e-13 * l.abs().max(1.0));
        }

        #[test]
        fn gamma_binomial_matches_lgamma_at_moderate_size(b in 0.1f64..40.0, c in 0.1f64..40.0) {
            let direct = lgamma_pos(b + c + 1.0) - lgamma_pos(b + 1.0) - lgamma_pos(c + 1.0);
            let got = log_gamma_binomial(b, c).unwrap();
            prop_assert!((got - direct).abs() <= 1e-12 * got.abs().max(1.0));
        }
    }
}
