//! Monte Carlo estimate of the measure from rotation-invariant samples.
//!
//! A vector with independent standard normal coordinates has a uniformly
//! distributed direction, and the event `‖Σx‖ < δσ_m‖x‖` depends only on
//! the direction, so the hit fraction estimates the normalized measure.
//!
//! Samples are grouped in fixed-size batches; batch `b` draws from the
//! ChaCha stream `b` of the seed. The random numbers used by sample `i` are
//! therefore a function of `(seed, i)` alone and the result does not depend
//! on how batches are spread over worker threads.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::bounds::Spectrum;
use crate::error::{domain, usage, Error, Result};

/// Two-sided 99% standard normal quantile, `Φ⁻¹(0.995)`.
pub const Z_99: f64 = 2.575_829_303_548_900_4;

const BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub hits: u64,
    pub samples: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seed: u64,
    pub delta: f64,
}

impl McEstimate {
    fn new(hits: u64, samples: u64, seed: u64, delta: f64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(hits, samples, Z_99);
        McEstimate {
            hits,
            samples,
            p_hat: hits as f64 / samples as f64,
            ci_lo,
            ci_hi,
            seed,
            delta,
        }
    }

    /// Estimate of the complementary event `ratio >= δ`.
    pub fn complement(&self) -> McEstimate {
        McEstimate::new(self.samples - self.hits, self.samples, self.seed, self.delta)
    }

    /// Binomial standard error `√(p̂(1 - p̂)/N)`.
    pub fn std_err(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.samples as f64).sqrt()
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

/// Wilson score interval for `hits` successes in `samples` trials.
pub fn wilson_interval(hits: u64, samples: u64, z: f64) -> (f64, f64) {
    let n = samples as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0).min(p), (center + half).min(1.0).max(p))
}

/// `‖Σx‖ / (σ_m ‖x‖)` for one Gaussian vector `x ∈ R^n`.
pub fn sample_ratio<R: Rng + ?Sized>(spec: &Spectrum, rng: &mut R) -> f64 {
    let top = spec.sigma_max();
    let mut weighted = 0.0;
    let mut total = 0.0;
    for &(s, c) in spec.groups() {
        let w = (s / top).powi(2);
        let mut part = 0.0;
        for _ in 0..c {
            let z: f64 = rng.sample(StandardNormal);
            part += z * z;
        }
        weighted += w * part;
        total += part;
    }
    for _ in spec.m()..spec.n() {
        let z: f64 = rng.sample(StandardNormal);
        total += z * z;
    }
    (weighted / total).sqrt()
}

fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

fn batch_ranges(samples: u64) -> impl ParallelIterator<Item = (u64, u64)> {
    let batches = samples.div_ceil(BATCH);
    (0..batches)
        .into_par_iter()
        .map(move |b| (b, BATCH.min(samples - b * BATCH)))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    if workers == 0 {
        return Err(usage("worker count must be at least 1"));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Usage(format!("cannot start {workers} workers: {e}")))
}

/// Fraction of `samples` Gaussian directions with `ratio < δ`, with a 99%
/// Wilson interval. Bit-identical for a fixed `(seed, samples)` whatever
/// the worker count.
pub fn estimate_measure(spec: &Spectrum, delta: f64, samples: u64, seed: u64, workers: usize) -> Result<McEstimate> {
    if !(0.0..1.0).contains(&delta) {
        return Err(domain(format!("delta must lie in [0, 1), got {delta}")));
    }
    if samples == 0 {
        return Err(usage("at least one sample is required"));
    }
    let hits = pool(workers)?.install(|| {
        batch_ranges(samples)
            .map(|(b, len)| {
                let mut rng = batch_rng(seed, b);
                (0..len).filter(|_| sample_ratio(spec, &mut rng) < delta).count() as u64
            })
            .sum::<u64>()
    });
    Ok(McEstimate::new(hits, samples, seed, delta))
}

/// Empirical distribution function of the ratio on an ascending grid, from
/// one shared set of samples.
pub fn estimate_cdf(spec: &Spectrum, grid: &[f64], samples: u64, seed: u64) -> Result<Vec<McEstimate>> {
    if samples == 0 {
        return Err(usage("at least one sample is required"));
    }
    if grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(usage("grid must be sorted in ascending order"));
    }
    if let Some(d) = grid.iter().find(|d| !(0.0..1.0).contains(*d)) {
        return Err(domain(format!("grid values must lie in [0, 1), got {d}")));
    }
    // bins[i] counts samples whose first grid point strictly above the
    // ratio is grid[i].
    let bins = batch_ranges(samples)
        .map(|(b, len)| {
            let mut rng = batch_rng(seed, b);
            let mut bins = vec![0u64; grid.len() + 1];
            for _ in 0..len {
                let r = sample_ratio(spec, &mut rng);
                bins[grid.partition_point(|&d| d <= r)] += 1;
            }
            bins
        })
        .reduce(
            || vec![0u64; grid.len() + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let mut cumulative = 0;
    Ok(grid
        .iter()
        .zip(bins)
        .map(|(&d, count)| {
            cumulative += count;
            McEstimate::new(cumulative, samples, seed, d)
        })
        .collect())
}
