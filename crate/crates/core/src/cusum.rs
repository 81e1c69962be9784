// SPDX-License-Identifier: MIT OR Apache-2.0

//! CUSUM statistic, the at-most-one-changepoint (AMOC) test, and Monte Carlo
//! calibration of its critical values.
//!
//! For observations `X_1..X_N` the scaled CUSUM statistic at `k` is
//!
//! ```text
//! CUSUM(k) = ( sum_{t<=k} X_t - (k/N) * sum_{t<=N} X_t ) / (sigma_hat * sqrt(N))
//! ```
//!
//! with `sigma_hat^2` the usual N-1 sample variance. Under a no-change null
//! the maximum of `|CUSUM(k)|` behaves asymptotically like the sup of a
//! Brownian bridge, whose upper quantiles are embedded in
//! [`CRITICAL_VALUES`]. The AMOC test rejects when the observed maximum
//! exceeds the critical value and flags `tau_hat`, the maximizing index.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::accum::{self, CompensatedSum};
use crate::error::{Result, ShiftscanError};
use crate::parallel;
use crate::types::Series;

/// Embedded asymptotic critical values for `max_k |CUSUM(k)|`, as
/// `(confidence level, critical value)` pairs.
pub const CRITICAL_VALUES: [(f64, f64); 4] = [
    (0.90, 1.224),
    (0.95, 1.358),
    (0.975, 1.480),
    (0.99, 1.628),
];

/// Relative variance floor below which a series is treated as constant: the
/// CUSUM statistic divides by the sample standard deviation, so a variance
/// at rounding-noise scale is indistinguishable from zero.
const DEGENERACY_RATIO: f64 = 1e-24;

/// The confidence levels with embedded critical values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfidenceLevel {
    /// 90% confidence.
    P90,
    /// 95% confidence (the customary default).
    P95,
    /// 97.5% confidence.
    P975,
    /// 99% confidence.
    P99,
}

impl ConfidenceLevel {
    /// All supported levels in ascending order.
    pub const ALL: [ConfidenceLevel; 4] = [
        ConfidenceLevel::P90,
        ConfidenceLevel::P95,
        ConfidenceLevel::P975,
        ConfidenceLevel::P99,
    ];

    /// The numeric confidence level.
    pub fn level(self) -> f64 {
        match self {
            ConfidenceLevel::P90 => 0.90,
            ConfidenceLevel::P95 => 0.95,
            ConfidenceLevel::P975 => 0.975,
            ConfidenceLevel::P99 => 0.99,
        }
    }

    /// The embedded asymptotic critical value for this level.
    pub fn critical_value(self) -> f64 {
        match self {
            ConfidenceLevel::P90 => 1.224,
            ConfidenceLevel::P95 => 1.358,
            ConfidenceLevel::P975 => 1.480,
            ConfidenceLevel::P99 => 1.628,
        }
    }

    /// Looks up the enum variant for a numeric level, tolerating float noise.
    pub fn from_level(level: f64) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| (c.level() - level).abs() < 1e-9)
            .ok_or(ShiftscanError::UnsupportedLevel(level))
    }
}

/// The full CUSUM profile of a series.
#[derive(Debug, Clone)]
pub struct CusumProfile {
    stats: Vec<f64>,
    sigma2: f64,
    tau_hat: usize,
    max_abs: f64,
}

impl CusumProfile {
    /// Signed `CUSUM(k)` for `k = 1..=N`; entry `k - 1` holds `CUSUM(k)`.
    /// The final entry is identically zero.
    pub fn stats(&self) -> &[f64] {
        &self.stats
    }

    /// The N-1 sample variance used for scaling.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// The maximizing index: `argmax_{2<=k<=N} |CUSUM(k)|`, smallest index
    /// on ties.
    pub fn tau_hat(&self) -> usize {
        self.tau_hat
    }

    /// `max_{2<=k<=N} |CUSUM(k)|`.
    pub fn max_abs(&self) -> f64 {
        self.max_abs
    }
}

/// Outcome of the AMOC hypothesis test at a fixed confidence level.
#[derive(Debug, Clone, Copy)]
pub struct AmocOutcome {
    /// Whether the no-changepoint null was rejected.
    pub reject: bool,
    /// The confidence level the test ran at.
    pub level: ConfidenceLevel,
    /// The critical value compared against.
    pub critical_value: f64,
    /// The maximizing index (the estimated changepoint when `reject`).
    pub tau_hat: usize,
    /// The observed `max_k |CUSUM(k)|`.
    pub max_abs: f64,
}

/// One simulated critical value.
#[derive(Debug, Clone, Copy)]
pub struct CriticalValueEstimate {
    /// The confidence level the quantile was taken at.
    pub level: f64,
    /// The simulated upper quantile of `max_k |CUSUM(k)|`.
    pub value: f64,
}

/// Sample mean, N-1 variance, and a degeneracy verdict for raw values.
/// Degeneracy is judged relative to the squared magnitude of the data so a
/// constant series stays degenerate even when rounding noise leaves the
/// accumulated variance slightly above zero.
pub(crate) fn null_moments(values: &[f64]) -> (f64, f64, bool) {
    let n = values.len() as f64;
    let mean = accum::sum(values) / n;
    let mut ss = CompensatedSum::new();
    let mut scale2 = 0.0f64;
    for &v in values {
        let d = v - mean;
        ss.add(d * d);
        scale2 = scale2.max(v * v);
    }
    let sigma2 = ss.value() / (n - 1.0);
    let degenerate = sigma2 <= scale2 * DEGENERACY_RATIO;
    (mean, sigma2, degenerate)
}

/// Lean CUSUM maximum for a raw slice: returns `(tau_hat, max_abs)` without
/// allocating the profile, or `None` when the slice is degenerate. This is
/// the inner loop of both segmentation and Monte Carlo calibration.
pub(crate) fn max_abs_cusum(values: &[f64]) -> Option<(usize, f64)> {
    let n = values.len();
    debug_assert!(n >= 2, "CUSUM needs at least two observations");
    let (_, sigma2, degenerate) = null_moments(values);
    if degenerate {
        return None;
    }
    let total = accum::sum(values);
    let denom = sigma2.sqrt() * (n as f64).sqrt();
    let mut acc = CompensatedSum::new();
    let mut tau_hat = 2usize;
    let mut max_abs = f64::NEG_INFINITY;
    for (k, &v) in values.iter().enumerate().map(|(i, v)| (i + 1, v)) {
        acc.add(v);
        if k < 2 {
            continue;
        }
        let stat = (acc.value() - (k as f64 / n as f64) * total) / denom;
        if stat.abs() > max_abs {
            max_abs = stat.abs();
            tau_hat = k;
        }
    }
    Some((tau_hat, max_abs))
}

/// Computes the full CUSUM profile of a series.
///
/// Errors with [`ShiftscanError::DegenerateSeries`] when the sample variance
/// is numerically zero.
pub fn cusum_profile(series: &Series) -> Result<CusumProfile> {
    let values = series.values();
    let n = values.len();
    let (_, sigma2, degenerate) = null_moments(values);
    if degenerate {
        return Err(ShiftscanError::DegenerateSeries);
    }
    let total = accum::sum(values);
    let denom = sigma2.sqrt() * (n as f64).sqrt();
    let mut stats = Vec::with_capacity(n);
    let mut acc = CompensatedSum::new();
    for (k, &v) in values.iter().enumerate().map(|(i, v)| (i + 1, v)) {
        acc.add(v);
        stats.push((acc.value() - (k as f64 / n as f64) * total) / denom);
    }
    let mut tau_hat = 2usize;
    let mut max_abs = f64::NEG_INFINITY;
    for (k, stat) in stats.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        if k < 2 {
            continue;
        }
        if stat.abs() > max_abs {
            max_abs = stat.abs();
            tau_hat = k;
        }
    }
    Ok(CusumProfile {
        stats,
        sigma2,
        tau_hat,
        max_abs,
    })
}

/// Runs the AMOC test: rejects the no-changepoint null when the CUSUM
/// maximum exceeds the critical value for `level`, flagging `tau_hat`.
pub fn amoc_test(series: &Series, level: ConfidenceLevel) -> Result<AmocOutcome> {
    let profile = cusum_profile(series)?;
    let critical_value = level.critical_value();
    Ok(AmocOutcome {
        reject: profile.max_abs > critical_value,
        level,
        critical_value,
        tau_hat: profile.tau_hat,
        max_abs: profile.max_abs,
    })
}

/// Estimates critical values by Monte Carlo: draws `reps` standard-normal
/// series of length `n`, computes `max_k |CUSUM(k)|` for each, and returns
/// the empirical upper quantile at every requested confidence level.
///
/// Replicate `r` uses RNG stream `r` of the seeded generator, so results are
/// bit-identical regardless of how many worker threads run the replicates.
pub fn simulate_critical_values(
    n: usize,
    reps: usize,
    levels: &[f64],
    seed: u64,
) -> Result<Vec<CriticalValueEstimate>> {
    if n < 2 {
        return Err(ShiftscanError::invalid_parameter(format!(
            "Monte Carlo series length must be at least 2, got {n}"
        )));
    }
    if reps < 1 {
        return Err(ShiftscanError::invalid_parameter(
            "Monte Carlo needs at least one replicate",
        ));
    }
    if levels.is_empty() {
        return Err(ShiftscanError::invalid_parameter(
            "no confidence levels requested",
        ));
    }
    for &level in levels {
        if !(level > 0.0 && level < 1.0) {
            return Err(ShiftscanError::invalid_parameter(format!(
                "confidence level {level} is outside (0, 1)"
            )));
        }
    }

    let mut maxima: Vec<f64> = parallel::pool().install(|| {
        (0..reps as u64)
            .into_par_iter()
            .map(|rep| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(rep);
                let values: Vec<f64> = (0..n)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                // A degenerate normal sample has probability zero; treat it
                // as contributing no exceedance if it ever occurs.
                max_abs_cusum(&values).map_or(0.0, |(_, max)| max)
            })
            .collect()
    });
    maxima.sort_unstable_by(f64::total_cmp);

    Ok(levels
        .iter()
        .map(|&level| {
            let rank = (level * reps as f64).ceil() as usize;
            let idx = rank.clamp(1, reps) - 1;
            CriticalValueEstimate {
                level,
                value: maxima[idx],
            }
        })
        .collect())
}
