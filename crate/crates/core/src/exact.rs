//! Exact volume ratio of `{x : ‖Px‖ < δ‖x‖}` inside a ball, for the
//! orthogonal projection `P` onto the first `m` of `n` coordinates.
//!
//! With `α = k = (n - m - 2)/2` and `l = m/2` the ratio is
//!
//! ```text
//! ψ(δ) = 2Γ(n/2) / (Γ(m/2)Γ((n-m)/2)) ∫₀^δ (1 - t²)^α t^{m-1} dt
//! ```
//!
//! which equals the regularized incomplete beta `I_{δ²}(m/2, (n-m)/2)`.
//! Three evaluation routes are provided:
//!
//! * even gap `n - m`: a finite sum of `k + 1` positive terms,
//! * odd gap `>= 3`: the same sum truncated at `k - 1/2` plus a remainder
//!   integral `Δ(δ) ∈ [0, δ^{n-1}]`,
//! * any gap: direct quadrature after the substitution `t = sin φ`.
//!
//! Everything is carried in log space; values like `10^-325` are ordinary.

use std::fmt;

use crate::error::{domain, usage, Error, Result};
use crate::numeric::{integrate, log_binomial, log_gamma, log_gamma_binomial, log_sum_exp, LogValue, QuadOptions};

/// Default relative tolerance for every quadrature in this module.
pub const QUAD_TOL: f64 = 1e-12;

/// Target dimension `m` and ambient dimension `n`, `1 <= m < n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dimensions {
    m: u64,
    n: u64,
}

impl Dimensions {
    pub fn new(m: u64, n: u64) -> Result<Self> {
        if m == 0 {
            return Err(usage("target dimension m must be at least 1"));
        }
        if m >= n {
            return Err(usage(format!("dimensions require m < n, got m={m}, n={n}")));
        }
        Ok(Dimensions { m, n })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn gap(&self) -> u64 {
        self.n - self.m
    }

    /// `ξ = √(m/n)`, the jump position of the limiting step function.
    pub fn xi(&self) -> f64 {
        self.xi_sq().sqrt()
    }

    pub fn xi_sq(&self) -> f64 {
        self.m as f64 / self.n as f64
    }

    pub fn params(&self) -> ExactParams {
        ExactParams::new(*self)
    }
}

impl fmt::Display for Dimensions {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(m={}, n={})", self.m, self.n)
    }
}

/// Exponents of the series representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactParams {
    /// `(n - m - 2)/2`, at least `-1/2`.
    pub alpha: f64,
    /// Same as `alpha`; named separately where it acts as the series length.
    pub k: f64,
    /// `m/2`.
    pub l: f64,
    /// Last summation index: `k` for even gaps, `k - 1/2` for odd gaps of
    /// at least 3, absent for gap 1.
    pub nu: Option<u64>,
}

impl ExactParams {
    pub fn new(dims: Dimensions) -> Self {
        let gap = dims.gap();
        let k = (gap as f64 - 2.0) / 2.0;
        let nu = if gap.is_multiple_of(2) {
            Some((gap - 2) / 2)
        } else if gap >= 3 {
            Some((gap - 3) / 2)
        } else {
            None
        };
        ExactParams {
            alpha: k,
            k,
            l: dims.m as f64 / 2.0,
            nu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    EvenPolynomial,
    OddWithRemainder,
    Quadrature,
    Bound,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::EvenPolynomial => "even-polynomial",
            Method::OddWithRemainder => "odd-with-remainder",
            Method::Quadrature => "quadrature",
            Method::Bound => "bound",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "even-polynomial" => Ok(Method::EvenPolynomial),
            "odd-with-remainder" => Ok(Method::OddWithRemainder),
            "quadrature" => Ok(Method::Quadrature),
            "bound" => Ok(Method::Bound),
            other => Err(usage(format!("unknown method tag {other:?}"))),
        }
    }
}

/// A measure (or bound) with the bracket the evaluation route certifies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureResult {
    pub value: LogValue,
    pub method: Method,
    pub bracket_lo: LogValue,
    pub bracket_hi: LogValue,
}

impl MeasureResult {
    pub fn exact(value: LogValue, method: Method) -> Self {
        MeasureResult {
            value,
            method,
            bracket_lo: value,
            bracket_hi: value,
        }
    }

    pub fn trivial_bound() -> Self {
        MeasureResult::exact(LogValue::ONE, Method::Bound)
    }

    fn zero(method: Method) -> Self {
        MeasureResult::exact(LogValue::ZERO, method)
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&delta) {
        return Err(domain(format!("delta must lie in [0, 1), got {delta}")));
    }
    Ok(())
}

/// Partial sum `Σ_{j=0}^{ν} Γ(k+l+1)/(Γ(k-j+1)Γ(l+j+1)) (1-δ²)^{k-j} δ^{2(l+j)}`
/// with the log coefficients precomputed.
#[derive(Debug, Clone)]
struct GammaSeries {
    k: f64,
    l: f64,
    log_coeffs: Vec<f64>,
}

impl GammaSeries {
    fn new(k: f64, l: f64, nu: u64) -> Result<Self> {
        let log_coeffs = (0..=nu)
            .map(|j| {
                let j = j as f64;
                log_gamma_binomial(k - j, l + j)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GammaSeries { k, l, log_coeffs })
    }

    fn eval(&self, delta: f64) -> LogValue {
        if delta == 0.0 {
            return LogValue::ZERO;
        }
        let ln_d = delta.ln();
        let ln_c = (-delta * delta).ln_1p();
        let terms: Vec<f64> = self
            .log_coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let j = j as f64;
                let pow_c = if self.k - j == 0.0 { 0.0 } else { (self.k - j) * ln_c };
                c + pow_c + 2.0 * (self.l + j) * ln_d
            })
            .collect();
        LogValue::from_ln(log_sum_exp(&terms).expect("series has at least one term")).clamp_unit()
    }
}

/// `ln ∫_lo^hi sin^p φ cos^q φ dφ` for `p, q >= 0`, `0 <= lo <= hi <= π/2`,
/// with the integrand rescaled by its maximum on the interval.
fn log_sin_cos_integral(p: f64, q: f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    let log_f = |phi: f64| -> f64 {
        let mut v = 0.0;
        if p != 0.0 {
            v += p * phi.sin().ln();
        }
        if q != 0.0 {
            v += q * phi.cos().ln();
        }
        v
    };
    let peak = if p == 0.0 && q == 0.0 {
        lo
    } else if q == 0.0 {
        hi
    } else if p == 0.0 {
        lo
    } else {
        (p / q).sqrt().atan()
    };
    let peak = peak.clamp(lo, hi);
    let mut log_max = log_f(peak);
    if !log_max.is_finite() {
        // peak at φ = 0 with p > 0 only happens when lo = hi = 0
        log_max = 0.0;
    }
    let res = integrate(|phi| (log_f(phi) - log_max).exp(), lo, hi, &QuadOptions::relative(tol))?;
    if res.value <= 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0));
    }
    Ok((log_max + res.value.ln(), res.error / res.value))
}

/// Normalizing constant `ln [2Γ(n/2) / (Γ(m/2)Γ((n-m)/2))]`.
fn log_prefactor(dims: Dimensions) -> f64 {
    let n = dims.n as f64;
    let m = dims.m as f64;
    std::f64::consts::LN_2 + log_gamma(n / 2.0).unwrap()
        - log_gamma(m / 2.0).unwrap()
        - log_gamma((n - m) / 2.0).unwrap()
}

/// Log of the remainder constant `(2/√π) Γ(n/2)/Γ((n-1)/2)`.
fn log_remainder_constant(n: u64) -> f64 {
    // (2/√π) Γ(n/2)/Γ((n-1)/2) = Γ(n/2) / (Γ((n-1)/2) Γ(3/2))
    log_gamma_binomial((n as f64 - 3.0) / 2.0, 0.5).expect("n >= 4 for odd gaps of at least 3")
}

/// `Δ(δ)` in log space together with its relative quadrature error.
fn odd_remainder(n: u64, delta: f64, tol: f64) -> Result<(LogValue, f64)> {
    if delta == 0.0 {
        return Ok((LogValue::ZERO, 0.0));
    }
    // Δ = C δ^{n-2} ∫₀^{asin δ} (sin φ / δ)^{n-2} dφ
    let p = n as f64 - 2.0;
    let ln_d = delta.ln();
    let res = integrate(
        |phi: f64| (p * (phi.sin().ln() - ln_d)).exp(),
        0.0,
        delta.asin(),
        &QuadOptions::relative(tol),
    )?;
    let ln = log_remainder_constant(n) + p * ln_d + res.value.ln();
    Ok((LogValue::from_ln(ln), res.error / res.value))
}

/// Prepared evaluator for one pair of dimensions. Sweeps over `δ` reuse the
/// series coefficients.
#[derive(Debug, Clone)]
pub struct PsiEvaluator {
    dims: Dimensions,
    series: Option<GammaSeries>,
    tol: f64,
}

impl PsiEvaluator {
    pub fn new(dims: Dimensions) -> Result<Self> {
        Self::with_tolerance(dims, QUAD_TOL)
    }

    pub fn with_tolerance(dims: Dimensions, tol: f64) -> Result<Self> {
        let p = dims.params();
        let series = match p.nu {
            Some(nu) => Some(GammaSeries::new(p.k, p.l, nu)?),
            None => None,
        };
        Ok(PsiEvaluator { dims, series, tol })
    }

    pub fn dims(&self) -> Dimensions {
        self.dims
    }

    /// The method `eval` dispatches to.
    pub fn method(&self) -> Method {
        match self.dims.gap() {
            g if g % 2 == 0 => Method::EvenPolynomial,
            1 => Method::Quadrature,
            _ => Method::OddWithRemainder,
        }
    }

    /// Log coefficients of the (possibly truncated) series, index `j = 0..=ν`.
    pub fn log_coefficients(&self) -> Option<&[f64]> {
        self.series.as_ref().map(|s| s.log_coeffs.as_slice())
    }

    /// Values above one half are recomputed as `1 - (1 - ψ)` from the
    /// complement, which keeps `ln ψ` accurate as `ψ → 1`.
    pub fn eval(&self, delta: f64) -> Result<MeasureResult> {
        let r = self.eval_direct(delta)?;
        if r.value.ln() <= -std::f64::consts::LN_2 {
            return Ok(r);
        }
        let value = complement_route(self.dims, delta, self.tol)?.complement();
        Ok(MeasureResult {
            value,
            method: r.method,
            bracket_lo: r.bracket_lo.min(value),
            bracket_hi: r.bracket_hi.max(value),
        })
    }

    fn eval_direct(&self, delta: f64) -> Result<MeasureResult> {
        check_delta(delta)?;
        let method = self.method();
        if delta == 0.0 {
            return Ok(MeasureResult::zero(method));
        }
        match method {
            Method::EvenPolynomial => {
                let v = self.series.as_ref().expect("even gap has a series").eval(delta);
                Ok(MeasureResult::exact(v, method))
            }
            Method::OddWithRemainder => {
                let sum = self.series.as_ref().expect("odd gap >= 3 has a series").eval(delta);
                let (rem, _) = odd_remainder(self.dims.n, delta, self.tol)?;
                let cap = LogValue::from_ln((self.dims.n as f64 - 1.0) * delta.ln());
                Ok(MeasureResult {
                    value: (sum + rem).clamp_unit(),
                    method,
                    bracket_lo: sum,
                    bracket_hi: (sum + cap).clamp_unit(),
                })
            }
            _ => {
                let (v, rel_err) = quadrature_route(self.dims, delta, self.tol)?;
                Ok(MeasureResult {
                    value: v,
                    method,
                    bracket_lo: v * LogValue::from_ln((-rel_err).ln_1p()),
                    bracket_hi: (v * LogValue::from_ln(rel_err.ln_1p())).clamp_unit(),
                })
            }
        }
    }
}

fn quadrature_route(dims: Dimensions, delta: f64, tol: f64) -> Result<(LogValue, f64)> {
    if delta == 0.0 {
        return Ok((LogValue::ZERO, 0.0));
    }
    let p = dims.m as f64 - 1.0;
    let q = dims.gap() as f64 - 1.0;
    let (ln_int, rel_err) = log_sin_cos_integral(p, q, 0.0, delta.asin(), tol)?;
    let v = LogValue::from_ln(log_prefactor(dims) + ln_int).clamp_unit();
    Ok((v, rel_err))
}

/// Volume ratio for the projection, dispatched by the parity of `n - m`.
///
/// Even gaps return a degenerate bracket. Odd gaps of at least 3 return the
/// partial sum plus the quadrature remainder, bracketed by
/// `[sum, sum + δ^{n-1}]`. Gap 1 uses quadrature, bracketed by its error
/// estimate.
pub fn psi(dims: Dimensions, delta: f64) -> Result<MeasureResult> {
    check_delta(delta)?;
    PsiEvaluator::new(dims)?.eval(delta)
}

/// Finite sum for even `n - m`.
pub fn psi_even(dims: Dimensions, delta: f64) -> Result<LogValue> {
    if !dims.gap().is_multiple_of(2) {
        return Err(usage(format!("psi_even requires an even gap n - m, got {dims}")));
    }
    check_delta(delta)?;
    Ok(PsiEvaluator::new(dims)?.eval(delta)?.value)
}

/// Truncated sum plus remainder for odd `n - m >= 3`; gap 1 is handed to
/// the quadrature route.
pub fn psi_odd(dims: Dimensions, delta: f64) -> Result<MeasureResult> {
    if dims.gap().is_multiple_of(2) {
        return Err(usage(format!("psi_odd requires an odd gap n - m, got {dims}")));
    }
    check_delta(delta)?;
    PsiEvaluator::new(dims)?.eval(delta)
}

/// The remainder `Δ(δ)` of the odd-gap representation alone.
pub fn odd_gap_remainder(dims: Dimensions, delta: f64) -> Result<LogValue> {
    if dims.gap().is_multiple_of(2) || dims.gap() < 3 {
        return Err(usage(format!("remainder is defined for odd gaps >= 3, got {dims}")));
    }
    check_delta(delta)?;
    Ok(odd_remainder(dims.n, delta, QUAD_TOL)?.0)
}

/// Direct quadrature of the integral representation, valid for every gap.
pub fn psi_quadrature(dims: Dimensions, delta: f64, tol: f64) -> Result<LogValue> {
    check_delta(delta)?;
    Ok(quadrature_route(dims, delta, tol)?.0)
}

/// Bernstein-polynomial form for `m` and `n` both even:
/// `Σ_{j=l}^{k+l} C(k+l, j) (1-δ²)^{k+l-j} δ^{2j}`.
pub fn bernstein_form(dims: Dimensions, delta: f64) -> Result<LogValue> {
    let (order, l) = bernstein_indices(dims)?;
    check_delta(delta)?;
    bernstein_sum(order, l..=order, delta)
}

fn bernstein_indices(dims: Dimensions) -> Result<(u64, u64)> {
    if !dims.m.is_multiple_of(2) || !dims.n.is_multiple_of(2) {
        return Err(usage(format!("Bernstein form requires m and n even, got {dims}")));
    }
    Ok((dims.n / 2 - 1, dims.m / 2))
}

fn bernstein_sum(order: u64, range: std::ops::RangeInclusive<u64>, delta: f64) -> Result<LogValue> {
    if range.is_empty() {
        return Ok(LogValue::ZERO);
    }
    let ln_d = if delta == 0.0 { f64::NEG_INFINITY } else { delta.ln() };
    let ln_c = (-delta * delta).ln_1p();
    let terms = range
        .map(|j| {
            let pow_c = if order == j { 0.0 } else { (order - j) as f64 * ln_c };
            let pow_d = if j == 0 { 0.0 } else { 2.0 * j as f64 * ln_d };
            Ok(log_binomial(order, j)? + pow_c + pow_d)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LogValue::from_ln(log_sum_exp(&terms)?).clamp_unit())
}

/// `1 - ψ(δ)` computed without cancellation: the complementary Bernstein
/// terms when `m` and `n` are even, quadrature over `[δ, 1]` otherwise.
pub fn psi_complement(dims: Dimensions, delta: f64) -> Result<LogValue> {
    check_delta(delta)?;
    complement_route(dims, delta, QUAD_TOL)
}

fn complement_route(dims: Dimensions, delta: f64, tol: f64) -> Result<LogValue> {
    if delta == 0.0 {
        return Ok(LogValue::ONE);
    }
    if let Ok((order, l)) = bernstein_indices(dims) {
        return bernstein_sum(order, 0..=l - 1, delta);
    }
    let p = dims.m as f64 - 1.0;
    let q = dims.gap() as f64 - 1.0;
    let (ln_int, _) = log_sin_cos_integral(p, q, delta.asin(), std::f64::consts::FRAC_PI_2, tol)?;
    Ok(LogValue::from_ln(log_prefactor(dims) + ln_int).clamp_unit())
}

/// Distribution function `F(δ) = P(‖Px‖ < δ‖x‖)` for a uniformly random
/// direction `x`; identical to [`psi`].
pub fn rpt_distribution(dims: Dimensions, delta: f64) -> Result<LogValue> {
    Ok(psi(dims, delta)?.value)
}
