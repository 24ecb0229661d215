use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use crate::error::{usage, Result};

/// A nonnegative quantity stored as its natural logarithm.
///
/// `-inf` encodes an exact zero. Nothing in this type exponentiates behind
/// the caller's back: [`LogValue::to_linear`] is the only conversion and it
/// may underflow to `0.0` for values below the smallest subnormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue(f64);

impl LogValue {
    pub const ZERO: LogValue = LogValue(f64::NEG_INFINITY);
    pub const ONE: LogValue = LogValue(0.0);

    pub fn from_ln(ln: f64) -> Self {
        debug_assert!(!ln.is_nan(), "LogValue from NaN");
        LogValue(ln)
    }

    /// Panics on negative or NaN input.
    pub fn from_linear(x: f64) -> Self {
        assert!(x >= 0.0, "LogValue::from_linear of negative or NaN value {x}");
        LogValue(x.ln())
    }

    #[inline]
    pub fn ln(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn log10(self) -> f64 {
        self.0 / std::f64::consts::LN_10
    }

    #[inline]
    pub fn to_linear(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    pub fn powf(self, p: f64) -> Self {
        if p == 0.0 {
            return LogValue::ONE;
        }
        LogValue(self.0 * p)
    }

    /// `ln(1 - x)` for a value `x <= 1`; clamps to zero when `x` rounds to one.
    pub fn complement(self) -> Self {
        if self.0 >= 0.0 {
            return LogValue::ZERO;
        }
        // ln(1 - e^l): use ln(-expm1(l)) near zero, ln1p(-e^l) otherwise.
        if self.0 > -std::f64::consts::LN_2 {
            LogValue((-self.0.exp_m1()).ln())
        } else {
            LogValue((-self.0.exp()).ln_1p())
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other.0 < self.0 {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }

    /// Clamp into `[0, 1]` on the linear scale.
    pub fn clamp_unit(self) -> Self {
        if self.0 > 0.0 {
            LogValue::ONE
        } else {
            self
        }
    }

    /// Six significant digits with a decimal exponent (`2.5E-1`), computed
    /// entirely from the logarithm so values below `f64::MIN_POSITIVE` still
    /// render. Exact zero renders as `0`.
    pub fn render(self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        if !self.0.is_finite() {
            return "inf".to_string();
        }
        let l10 = self.log10();
        let mut exponent = l10.floor();
        let mut mantissa = 10f64.powf(l10 - exponent);
        mantissa = (mantissa * 1e5).round() / 1e5;
        if mantissa >= 10.0 {
            mantissa /= 10.0;
            exponent += 1.0;
        }
        let digits = format!("{mantissa:.5}");
        let digits = digits.trim_end_matches('0').trim_end_matches('.');
        format!("{digits}E{}", exponent as i64)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl PartialOrd for LogValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl Add for LogValue {
    type Output = LogValue;

    fn add(self, rhs: LogValue) -> LogValue {
        let (hi, lo) = if self.0 >= rhs.0 {
            (self.0, rhs.0)
        } else {
            (rhs.0, self.0)
        };
        if lo == f64::NEG_INFINITY {
            return LogValue(hi);
        }
        LogValue(hi + (lo - hi).exp().ln_1p())
    }
}

impl Mul for LogValue {
    type Output = LogValue;

    fn mul(self, rhs: LogValue) -> LogValue {
        if self.is_zero() || rhs.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 + rhs.0)
    }
}

impl Div for LogValue {
    type Output = LogValue;

    // quotients are differences of logs
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return LogValue::ZERO;
        }
        LogValue(self.0 - rhs.0)
    }
}

/// `ln(sum(exp(t)))` with the largest term factored out.
///
/// Entries may be `-inf` (zero addends). When the largest term dominates the
/// rest by more than ~745 nats the result is that term, bit for bit.
pub fn log_sum_exp(terms: &[f64]) -> Result<f64> {
    let (imax, &max) = terms
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .ok_or_else(|| usage("log_sum_exp of an empty sequence"))?;
    if max.is_infinite() || max.is_nan() {
        return Ok(max);
    }
    let rest: f64 = terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != imax)
        .map(|(_, &t)| (t - max).exp())
        .sum();
    Ok(max + rest.ln_1p())
}
