//! Upper and lower bounds on the measure for general singular-value spectra.
//!
//! Every bound returns the trivial value 1 (log 0) when its smallness
//! precondition fails, so sweeps over `δ` are total.

use crate::error::{domain, usage, Error, Result};
use crate::exact::{psi, Dimensions, MeasureResult, Method};
use crate::numeric::LogValue;

/// Singular values `σ₁ <= ... <= σ_m`, run-length encoded, of an `m × n`
/// matrix with `m < n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    groups: Vec<(f64, u64)>,
    m: u64,
    n: u64,
}

impl Spectrum {
    /// Build from `(value, count)` pairs in ascending order. Adjacent equal
    /// values are merged.
    pub fn new(groups: impl IntoIterator<Item = (f64, u64)>, n: u64) -> Result<Self> {
        let mut merged: Vec<(f64, u64)> = Vec::new();
        for (value, count) in groups {
            if !(value > 0.0) || !value.is_finite() {
                return Err(domain(format!(
                    "singular values must be finite and positive, got {value}"
                )));
            }
            if count == 0 {
                return Err(usage("singular value counts must be positive"));
            }
            match merged.last_mut() {
                Some((last, c)) if *last == value => *c += count,
                Some((last, _)) if *last > value => {
                    return Err(usage(format!("singular values must ascend, got {value} after {last}")))
                }
                _ => merged.push((value, count)),
            }
        }
        if merged.is_empty() {
            return Err(usage("spectrum needs at least one singular value"));
        }
        let m: u64 = merged.iter().map(|g| g.1).sum();
        if m >= n {
            return Err(usage(format!(
                "spectrum has {m} singular values but ambient dimension {n}"
            )));
        }
        Ok(Spectrum { groups: merged, m, n })
    }

    /// Sorts the values, then run-length encodes them.
    pub fn from_values(values: &[f64], n: u64) -> Result<Self> {
        let mut v = values.to_vec();
        if v.iter().any(|x| x.is_nan()) {
            return Err(domain("singular values must not be NaN"));
        }
        v.sort_by(f64::total_cmp);
        Self::new(v.into_iter().map(|x| (x, 1)), n)
    }

    /// All singular values equal to one: the orthogonal projection.
    pub fn identity(dims: Dimensions) -> Self {
        Spectrum {
            groups: vec![(1.0, dims.m())],
            m: dims.m(),
            n: dims.n(),
        }
    }

    pub fn groups(&self) -> &[(f64, u64)] {
        &self.groups
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dims(&self) -> Dimensions {
        Dimensions::new(self.m, self.n).expect("validated on construction")
    }

    pub fn sigma_min(&self) -> f64 {
        self.groups[0].0
    }

    pub fn sigma_max(&self) -> f64 {
        self.groups[self.groups.len() - 1].0
    }

    /// Condition number `σ_m / σ₁`.
    pub fn kappa(&self) -> f64 {
        self.sigma_max() / self.sigma_min()
    }

    /// `κ̄` with `1/κ̄² = (1/m) Σ (σ_k/σ_m)²`; always `1 <= κ̄ <= κ`.
    pub fn kappa_bar(&self) -> f64 {
        let top = self.sigma_max();
        let mean: f64 = self
            .groups
            .iter()
            .map(|&(s, c)| c as f64 * (s / top).powi(2))
            .sum::<f64>()
            / self.m as f64;
        1.0 / mean.sqrt()
    }

    /// Number of leading singular values strictly below the largest one,
    /// i.e. the smallest `m0` with `σ_k = σ_m` for all `k > m0`.
    pub fn clustered_cutoff(&self) -> u64 {
        self.m - self.groups[self.groups.len() - 1].1
    }

    /// Every singular value multiplied by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.groups.iter().map(|&(s, c)| (s * factor, c)), self.n)
    }

    /// Squared ratios `(σ_k/σ_m)²` with their counts.
    fn relative_squares(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let top = self.sigma_max();
        self.groups.iter().map(move |&(s, c)| ((s / top).powi(2), c as f64))
    }
}

/// Result of minimizing the exponential-moment function `X(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffSolve {
    pub t_star: f64,
    /// `ln min X`; zero when the minimum sits at `t = 0`.
    pub min_log: f64,
    pub converged: bool,
    pub condition_holds: bool,
}

fn check_open_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

/// `ln X` and its first two derivatives in the scaled variable `s = σ_m² t`.
struct MomentFunction<'a> {
    spec: &'a Spectrum,
    d2: f64,
    tail: f64,
}

impl<'a> MomentFunction<'a> {
    fn new(spec: &'a Spectrum, delta: f64) -> Self {
        MomentFunction {
            spec,
            d2: delta * delta,
            tail: (spec.n - spec.m) as f64 / 2.0,
        }
    }

    fn upper(&self) -> f64 {
        1.0 / self.d2
    }

    fn value(&self, s: f64) -> f64 {
        let head: f64 = self
            .spec
            .relative_squares()
            .map(|(r, c)| c * (s * (r - self.d2)).ln_1p())
            .sum();
        -0.5 * head - self.tail * (-self.d2 * s).ln_1p()
    }

    fn slope_and_curvature(&self, s: f64) -> (f64, f64) {
        let mut g = 0.0;
        let mut h = 0.0;
        for (r, c) in self.spec.relative_squares() {
            let a = r - self.d2;
            let q = a / (1.0 + s * a);
            g -= 0.5 * c * q;
            h += 0.5 * c * q * q;
        }
        let q = self.d2 / (1.0 - self.d2 * s);
        g += self.tail * q;
        h += self.tail * q * q;
        (g, h)
    }
}

/// `ln X(t)` with
/// `X(t) = Π_k (1 - δ²σ_m² t + σ_k² t)^{-1/2} (1 - δ²σ_m² t)^{-(n-m)/2}`
/// on `0 <= t < 1/(δ²σ_m²)`.
pub fn chernoff_x(spec: &Spectrum, delta: f64, t: f64) -> Result<f64> {
    check_open_delta(delta)?;
    let top2 = spec.sigma_max().powi(2);
    let limit = 1.0 / (delta * delta * top2);
    if !(t >= 0.0 && t < limit) {
        return Err(domain(format!("t must lie in [0, {limit}), got {t}")));
    }
    Ok(MomentFunction::new(spec, delta).value(t * top2))
}

const NEWTON_BUDGET: usize = 400;
const NEWTON_STEP_TOL: f64 = 1e-12;

/// Minimize `X(t)` by safeguarded Newton on `d/dt ln X`, falling back to
/// bisection whenever a step leaves the current bracket.
///
/// When `κ̄δ >= √(m/n)` the slope at zero is nonnegative, the minimum is
/// `X(0) = 1`, and the trivial solve is returned.
pub fn chernoff_min(spec: &Spectrum, delta: f64) -> Result<ChernoffSolve> {
    check_open_delta(delta)?;
    let xi = spec.dims().xi();
    let kbar = spec.kappa_bar();
    if kbar * delta >= xi {
        return Ok(ChernoffSolve {
            t_star: 0.0,
            min_log: 0.0,
            converged: true,
            condition_holds: false,
        });
    }
    let f = MomentFunction::new(spec, delta);
    let mut lo = 0.0;
    let mut hi = (1.0 - 1e-12) * f.upper();

    // Minimizer of the lower comparison function with all σ_k/σ_m = 1/κ̄.
    let db2 = (kbar * delta).powi(2);
    let xi2 = spec.dims().xi_sq();
    let guess = kbar * kbar * (xi2 - db2) / ((1.0 - db2) * db2);
    let mut s = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };

    let top2 = spec.sigma_max().powi(2);
    for _ in 0..NEWTON_BUDGET {
        let (g, h) = f.slope_and_curvature(s);
        if g == 0.0 {
            return Ok(solved(&f, s, top2));
        }
        if g < 0.0 {
            lo = s;
        } else {
            hi = s;
        }
        let mut next = s - g / h;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - s).abs() <= NEWTON_STEP_TOL * next || hi - lo <= NEWTON_STEP_TOL * lo {
            return Ok(solved(&f, next, top2));
        }
        s = next;
    }
    Err(Error::Numerical {
        message: format!(
            "Chernoff minimization did not converge; minimizer bracket [{}, {}]",
            lo / top2,
            hi / top2
        ),
        estimate: s / top2,
        error_bound: (hi - lo) / top2,
    })
}

fn solved(f: &MomentFunction<'_>, s: f64, top2: f64) -> ChernoffSolve {
    ChernoffSolve {
        t_star: s / top2,
        min_log: f.value(s).min(0.0),
        converged: true,
        condition_holds: true,
    }
}

/// `m · ln[(θ)(1 - θ²ξ²)/(1 - ξ²))^γ]` evaluated at `θ = kd/ξ`, the log of
/// the closed-form minimum for an identity-like spectrum.
fn log_identity_minimum(m: f64, xi_sq: f64, kd: f64) -> f64 {
    let gamma = (1.0 - xi_sq) / (2.0 * xi_sq);
    let ratio = (-kd * kd).ln_1p() - (-xi_sq).ln_1p();
    m * (kd.ln() - 0.5 * xi_sq.ln() + gamma * ratio)
}

/// Closed-form `(lower, upper)` bounds on `min X`: the lower side uses `κ̄`
/// and needs `κ̄δ < ξ`, the upper side uses `κ` and needs `κδ < ξ`. A side
/// whose condition fails is 1. For the identity spectrum both sides equal
/// the exact minimum.
pub fn closed_form_bounds(spec: &Spectrum, delta: f64) -> Result<(LogValue, LogValue)> {
    check_open_delta(delta)?;
    let dims = spec.dims();
    let xi = dims.xi();
    let m = dims.m() as f64;
    let side = |k: f64| {
        if k * delta < xi {
            LogValue::from_ln(log_identity_minimum(m, dims.xi_sq(), k * delta))
        } else {
            LogValue::ONE
        }
    };
    Ok((side(spec.kappa_bar()), side(spec.kappa())))
}

/// `ln φ(θ)` with `φ(θ) = θ exp((1 - θ²)/2)`. `θ = 0` gives log-zero.
///
/// Panics on negative or NaN `θ`.
pub fn phi(theta: f64) -> LogValue {
    assert!(theta >= 0.0, "phi requires theta >= 0, got {theta}");
    if theta == 0.0 {
        return LogValue::ZERO;
    }
    LogValue::from_ln(theta.ln() + 0.5 * (1.0 - theta * theta))
}

/// `φ(κδ/ξ)^m` when `κδ < ξ`, else 1.
pub fn phi_bound(spec: &Spectrum, delta: f64) -> Result<LogValue> {
    check_open_delta(delta)?;
    let dims = spec.dims();
    let kd = spec.kappa() * delta;
    if kd >= dims.xi() {
        return Ok(LogValue::ONE);
    }
    Ok(phi(kd / dims.xi()).powf(dims.m() as f64))
}

fn relabel(r: MeasureResult) -> MeasureResult {
    MeasureResult {
        method: Method::Bound,
        ..r
    }
}

/// `(lower, upper)` from the condition number alone: the projection measure
/// at `δ` below, and at `κδ` above when `κδ < 1` (otherwise 1).
pub fn kappa_bounds(dims: Dimensions, delta: f64, kappa: f64) -> Result<(MeasureResult, MeasureResult)> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(domain(format!("condition number must be finite and >= 1, got {kappa}")));
    }
    let lower = relabel(psi(dims, delta)?);
    let kd = kappa * delta;
    let upper = if kd < 1.0 {
        relabel(psi(dims, kd)?)
    } else {
        MeasureResult::trivial_bound()
    };
    Ok((lower, upper))
}

/// `φ(δ/ξ')^{m'}` with `m' = m - m0`, `ξ' = √(m'/n)` when `δ < ξ'`.
pub fn clustered_phi_bound(dims: Dimensions, m0: u64, delta: f64) -> Result<Option<LogValue>> {
    let reduced = reduced_dims(dims, m0)?;
    if !(0.0..1.0).contains(&delta) {
        return Err(domain(format!("delta must lie in [0, 1), got {delta}")));
    }
    let xi = reduced.xi();
    if delta >= xi {
        return Ok(None);
    }
    Ok(Some(phi(delta / xi).powf(reduced.m() as f64)))
}

fn reduced_dims(dims: Dimensions, m0: u64) -> Result<Dimensions> {
    if m0 >= dims.m() {
        return Err(usage(format!("cutoff m0={m0} must be below m={}", dims.m())));
    }
    Dimensions::new(dims.m() - m0, dims.n())
}

/// Bound for spectra with `σ_k = σ_m` for all `k > m0`: the projection
/// measure in dimensions `(m - m0, n)`, and the `φ` bound in the same
/// reduced dimensions when it applies.
///
/// `value` is the tighter of the two; the bracket spans both.
pub fn clustered_bound(dims: Dimensions, m0: u64, delta: f64) -> Result<MeasureResult> {
    let reduced = reduced_dims(dims, m0)?;
    let exact = psi(reduced, delta)?;
    let phi_part = clustered_phi_bound(dims, m0, delta)?;
    let (value, hi) = match phi_part {
        Some(p) => (exact.value.min(p), exact.bracket_hi.max(p)),
        None => (exact.value, exact.bracket_hi),
    };
    Ok(MeasureResult {
        value,
        method: Method::Bound,
        bracket_lo: exact.bracket_lo.min(value),
        bracket_hi: hi,
    })
}

/// `φ(δ/ξ)^m`, bounding the measure of `{‖Ax‖ >= δ‖A‖‖x‖}` for
/// `ξ < δ <= 1`.
pub fn tail_bound(dims: Dimensions, delta: f64) -> Result<LogValue> {
    let xi = dims.xi();
    if !(delta > xi && delta <= 1.0) {
        return Err(usage(format!(
            "tail bound needs xi < delta <= 1 with xi = {xi}, got {delta}"
        )));
    }
    Ok(phi(delta / xi).powf(dims.m() as f64))
}
