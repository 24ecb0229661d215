//! Regularized incomplete beta function by continued fraction.
//!
//! This is the reference the exact measure is checked against, so it is
//! kept free of any shared code with the polynomial evaluators in
//! `crate::exact`.

use super::logvalue::LogValue;
use super::special::log_gamma;
use crate::error::{domain, Error, Result};

const MAX_ITER: usize = 10_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `ln I_x(a, b)`.
///
/// Uses the continued fraction for `I_x(a, b)` when `x <= a / (a + b)` and
/// the symmetry `I_x(a, b) = 1 - I_{1-x}(b, a)` otherwise.
pub fn reg_incomplete_beta(a: f64, b: f64, x: f64) -> Result<LogValue> {
    if !(a > 0.0) || !(b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(domain(format!("incomplete beta requires a, b > 0, got ({a}, {b})")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(domain(format!("incomplete beta requires x in [0, 1], got {x}")));
    }
    if x == 0.0 {
        return Ok(LogValue::ZERO);
    }
    if x == 1.0 {
        return Ok(LogValue::ONE);
    }
    if x <= a / (a + b) {
        lower_branch(a, b, x, (-x).ln_1p())
    } else {
        // 1 - x is exact here for x >= 1/2; below that x.ln() is still exact.
        let y = 1.0 - x;
        let comp = lower_branch(b, a, y, x.ln())?;
        Ok(comp.complement())
    }
}

/// `ln I_x(a, b)` via the continued fraction, given `ln(1 - x)`.
fn lower_branch(a: f64, b: f64, x: f64, ln_one_minus_x: f64) -> Result<LogValue> {
    let ln_beta = log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?;
    let ln_front = a * x.ln() + b * ln_one_minus_x - ln_beta - a.ln();
    let cf = continued_fraction(a, b, x)?;
    Ok(LogValue::from_ln(ln_front + cf.ln()).clamp_unit())
}

/// Modified Lentz evaluation of
/// `1 / (1 + d1 / (1 + d2 / (1 + ...)))` with the standard incomplete-beta
/// coefficients.
fn continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;

        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::Numerical {
        message: format!("incomplete beta continued fraction did not converge for a={a}, b={b}, x={x}"),
        estimate: h,
        error_bound: f64::NAN,
    })
}
