//! Cross-module properties checked against independent oracles.

use num_bigint::BigUint;
use projection_measure::applications::{apply_t, schroedinger_spectrum};
use projection_measure::bounds::{kappa_bounds, Spectrum};
use projection_measure::exact::{psi, psi_complement, PsiEvaluator};
use projection_measure::montecarlo::estimate_measure;
use projection_measure::numeric::{log_binomial, log_gamma, reg_incomplete_beta};
use projection_measure::sweep::{clustered_sweep, delta_grid, parse_csv, psi_sweep};
use projection_measure::{Dimensions, LogValue};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dims(m: u64, n: u64) -> Dimensions {
    Dimensions::new(m, n).unwrap()
}

fn big_binomial(a: u64, b: u64) -> BigUint {
    (0..b).fold(BigUint::from(1u32), |acc, i| acc * (a - i) / (i + 1))
}

/// Natural log of a big integer to double precision.
fn big_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(64);
    let top: u64 = (x >> shift).try_into().unwrap();
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

#[test]
fn log_binomial_matches_big_integers() {
    for (a, b) in [(127, 63), (200, 100), (1000, 3), (64, 32), (2047, 1023), (50, 0)] {
        let exact = big_ln(&big_binomial(a, b));
        let got = log_binomial(a, b).unwrap();
        assert!(
            (got - exact).abs() <= 1e-13 * exact.abs().max(1.0),
            "C({a},{b}): {got} vs {exact}"
        );
    }
}

/// `ψ` at `δ² = 1/4` for even `m`, `n` is the rational
/// `Σ_{j >= m/2} C(N, j) 3^{N-j} / 4^N` with `N = n/2 - 1`.
#[test]
fn even_values_match_exact_rationals() {
    for (m, n) in [(2, 4), (4, 10), (10, 30), (64, 128), (128, 256), (200, 260), (1024, 2048)] {
        let order = n / 2 - 1;
        let mut num = BigUint::from(0u32);
        for j in m / 2..=order {
            num += big_binomial(order, j) * BigUint::from(3u32).pow((order - j) as u32);
        }
        let exact = big_ln(&num) - order as f64 * 4f64.ln();
        let got = psi(dims(m, n), 0.5).unwrap().value.ln();
        assert!(
            (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
            "({m},{n}): {got} vs {exact}"
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn psi_matches_incomplete_beta(m in 1u64..80, gap in 1u64..80, delta in 0.01f64..0.99) {
        let d = dims(m, m + gap);
        let got = psi(d, delta).unwrap().value;
        let want = reg_incomplete_beta(m as f64 / 2.0, gap as f64 / 2.0, delta * delta).unwrap();
        prop_assert!((got.ln() - want.ln()).abs() <= 1e-10 * want.ln().abs().max(1.0));
    }

    #[test]
    fn psi_in_unit_interval_and_monotone_in_delta(m in 1u64..40, gap in 1u64..40, a in 0.0f64..0.999, b in 0.0f64..0.999) {
        let d = dims(m, m + gap);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let vlo = psi(d, lo).unwrap();
        let vhi = psi(d, hi).unwrap();
        prop_assert!(vlo.value.ln() <= 0.0 && vhi.value.ln() <= 0.0);
        prop_assert!(vlo.value.ln() <= vhi.value.ln() + 1e-12);
        prop_assert!(vlo.bracket_lo <= vlo.value && vlo.value <= vlo.bracket_hi);
    }

    #[test]
    fn value_plus_complement_is_one(m in 1u64..60, gap in 1u64..60, delta in 0.0f64..0.999) {
        let d = dims(m, m + gap);
        let sum = psi(d, delta).unwrap().value.to_linear() + psi_complement(d, delta).unwrap().to_linear();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }
}

#[test]
fn endpoints() {
    for m in 1..=32u64 {
        for n in [m + 1, m + 2, m + 7, 2 * m + 1, 64] {
            if n <= m {
                continue;
            }
            let d = dims(m, n);
            assert!(psi(d, 0.0).unwrap().value.is_zero());
            assert!(psi(d, 1.0 - 1e-8).unwrap().value.to_linear() >= 1.0 - 1e-3, "{d}");
        }
    }
}

/// `d/dδ ψ = [2Γ(n/2)/(Γ(m/2)Γ((n-m)/2))] (1-δ²)^{(n-m-2)/2} δ^{m-1}`.
#[test]
fn derivative_matches_density() {
    let h = 1e-5;
    for (m, n) in [(1, 2), (1, 5), (2, 4), (3, 8), (5, 6), (7, 20), (12, 30), (16, 33)] {
        let eval = PsiEvaluator::new(dims(m, n)).unwrap();
        let (mf, nf) = (m as f64, n as f64);
        let log_pre = 2f64.ln() + log_gamma(nf / 2.0).unwrap()
            - log_gamma(mf / 2.0).unwrap()
            - log_gamma((nf - mf) / 2.0).unwrap();
        for i in 2..=18 {
            let delta = i as f64 * 0.05;
            let fd = (eval.eval(delta + h).unwrap().value.to_linear()
                - eval.eval(delta - h).unwrap().value.to_linear())
                / (2.0 * h);
            let density = (log_pre + (nf - mf - 2.0) / 2.0 * (-delta * delta).ln_1p() + (mf - 1.0) * delta.ln()).exp();
            assert!(
                (fd / density - 1.0).abs() < 1e-6,
                "({m},{n}) at {delta}: {fd} vs {density}"
            );
        }
    }
}

#[test]
fn step_function_sharpening() {
    let delta0 = std::f64::consts::FRAC_1_SQRT_2;
    let mut prev: Option<(f64, f64)> = None;
    for m in (2..=1024u64).step_by(2) {
        let d = dims(m, 2 * m);
        let below = psi(d, delta0 - 0.05).unwrap().value.ln();
        let above_miss = psi_complement(d, delta0 + 0.05).unwrap().ln();
        if let Some((b, a)) = prev {
            assert!(below < b, "below jump, m={m}");
            assert!(above_miss < a, "above jump, m={m}");
        }
        prev = Some((below, above_miss));
    }
}

#[test]
fn condition_number_sandwich_holds_empirically() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    for case in 0..12 {
        let m = rng.random_range(1..=12u64);
        let n = m + rng.random_range(1..=12u64);
        let values: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
        let spec = Spectrum::from_values(&values, n).unwrap();
        let delta = rng.random_range(0.2..0.8);
        let (lo, hi) = kappa_bounds(spec.dims(), delta, spec.kappa()).unwrap();
        let est = estimate_measure(&spec, delta, 50_000, 100 + case, 1).unwrap();
        assert!(est.ci_hi >= lo.value.to_linear(), "case {case}: {est:?} below {lo:?}");
        assert!(est.ci_lo <= hi.value.to_linear(), "case {case}: {est:?} above {hi:?}");
    }
}

#[test]
fn gram_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for np in 2..=8u64 {
        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        // blocks summing to zero
        let mut x: Vec<f64> = (0..3 * np).map(|_| rng.random_range(-1.0..1.0)).collect();
        for c in 0..3 {
            let mean = (0..np as usize).map(|i| x[3 * i + c]).sum::<f64>() / np as f64;
            for i in 0..np as usize {
                x[3 * i + c] -= mean;
            }
        }
        let tx = apply_t(np, &x).unwrap();
        assert!((norm2(&tx) / ((np + 1) as f64 * norm2(&x)) - 1.0).abs() < 1e-12);
        // all blocks equal
        let v: [f64; 3] = [rng.random(), rng.random(), rng.random()];
        let y: Vec<f64> = (0..np).flat_map(|_| v).collect();
        let ty = apply_t(np, &y).unwrap();
        assert!((norm2(&ty) / norm2(&y) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn clustered_curves_are_monotone() {
    let grid = delta_grid();
    for np in 4..=32 {
        let t = clustered_sweep(np, &grid).unwrap();
        for w in t.rows().windows(2) {
            assert!(w[0].result.value <= w[1].result.value, "N={np} at {}", w[1].delta);
        }
        let inst = schroedinger_spectrum(np).unwrap();
        assert_eq!(inst.reduced_m(), 3 * np - 3);
    }
}

#[test]
fn csv_round_trip_reproduces_values() {
    let grid = delta_grid();
    for (m, n) in [(1, 2), (5, 12), (64, 128), (1024, 2048)] {
        let d = dims(m, n);
        let csv = psi_sweep(d, &grid).unwrap().to_csv();
        for row in parse_csv(&csv).unwrap() {
            let v: LogValue = psi(d, row.delta).unwrap().value;
            assert_eq!(v.render(), row.value);
            if !v.is_zero() {
                assert!((row.log10_value - v.log10()).abs() <= 1e-11 * v.log10().abs().max(1.0));
            }
        }
    }
}
