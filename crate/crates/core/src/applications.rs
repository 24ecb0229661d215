//! Concrete spectra: the orbital/geminal coupling matrix `T` and the
//! random projection probabilities.

use crate::bounds::{phi, Spectrum};
use crate::error::{domain, usage, Result};
use crate::exact::{psi, psi_complement, Dimensions};
use crate::numeric::LogValue;

/// `A = Tᵗ` for `N` particles in three dimensions.
///
/// `T` maps `x = (x_1, ..., x_N)`, `x_i ∈ R³`, to the blocks `x_i` followed
/// by all differences `x_i - x_j`, `i < j`. Since
/// `‖Tx‖² = (N+1)‖x‖² - ‖Σ x_i‖²`, the squared singular values are 1 (three
/// times) and `N + 1` (`3N - 3` times).
#[derive(Debug, Clone, PartialEq)]
pub struct SchroedingerInstance {
    pub particles: u64,
    pub dims: Dimensions,
    pub spectrum: Spectrum,
    /// Singular values above index `m0` all equal the largest one.
    pub m0: u64,
}

impl SchroedingerInstance {
    pub fn kappa(&self) -> f64 {
        self.spectrum.kappa()
    }

    /// `m' = m - m0`.
    pub fn reduced_m(&self) -> u64 {
        self.dims.m() - self.m0
    }
}

pub fn schroedinger_spectrum(particles: u64) -> Result<SchroedingerInstance> {
    if particles < 2 {
        return Err(usage(format!("need at least 2 particles, got {particles}")));
    }
    let m = 3 * particles;
    let n = 3 * particles * (particles + 1) / 2;
    let dims = Dimensions::new(m, n)?;
    let spectrum = Spectrum::new([(1.0, 3), (((particles + 1) as f64).sqrt(), m - 3)], n)?;
    Ok(SchroedingerInstance {
        particles,
        dims,
        spectrum,
        m0: 3,
    })
}

/// `Tx`: the `N` blocks `x_i`, then `x_i - x_j` for `i < j` in
/// lexicographic order.
pub fn apply_t(particles: u64, x: &[f64]) -> Result<Vec<f64>> {
    let np = particles as usize;
    if x.len() != 3 * np {
        return Err(usage(format!(
            "expected a vector of length {}, got {}",
            3 * np,
            x.len()
        )));
    }
    let mut out = Vec::with_capacity(3 * np * (np + 1) / 2);
    out.extend_from_slice(x);
    for i in 0..np {
        for j in (i + 1)..np {
            for c in 0..3 {
                out.push(x[3 * i + c] - x[3 * j + c]);
            }
        }
    }
    Ok(out)
}

/// `T₀x = x_1 + ... + x_N ∈ R³`.
pub fn block_sum(x: &[f64]) -> [f64; 3] {
    let mut s = [0.0; 3];
    for block in x.chunks_exact(3) {
        for c in 0..3 {
            s[c] += block[c];
        }
    }
    s
}

/// `c = -ln φ(2) = 3/2 - ln 2`.
pub fn rpt_constant() -> f64 {
    -phi(2.0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RptProbability {
    /// `P((1-ε)ξ‖x‖ <= ‖Px‖ < (1+ε)ξ‖x‖)`.
    pub exact: f64,
    /// `1 - 2 exp(-c ε² m)`.
    pub lower_bound: f64,
    /// The complementary probability `F((1-ε)ξ) + 1 - F((1+ε)ξ)`, kept in
    /// log space so it stays accurate when `exact` rounds to 1.
    pub miss: LogValue,
    /// `2 exp(-c ε² m)`, the bound on `miss`.
    pub miss_bound: LogValue,
    pub c: f64,
}

/// Probability that a random direction keeps its projected norm within a
/// factor `1 ± ε` of `ξ`. An upper threshold `(1+ε)ξ >= 1` is clamped: the
/// distribution function is 1 there.
pub fn rpt_probability(dims: Dimensions, epsilon: f64) -> Result<RptProbability> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    let xi = dims.xi();
    let lo = (1.0 - epsilon) * xi;
    let hi = (1.0 + epsilon) * xi;
    let below_lo = psi(dims, lo)?.value;
    let above_hi = if hi >= 1.0 {
        LogValue::ZERO
    } else {
        psi_complement(dims, hi)?
    };
    let miss = (below_lo + above_hi).clamp_unit();
    let c = rpt_constant();
    let rate = c * epsilon * epsilon * dims.m() as f64;
    Ok(RptProbability {
        exact: miss.complement().to_linear(),
        lower_bound: -2.0 * (-rate).exp_m1() - 1.0,
        miss,
        miss_bound: LogValue::from_ln(std::f64::consts::LN_2 - rate),
        c,
    })
}
