// SPDX-License-Identifier: MIT OR Apache-2.0

//! Core data types: observed series, changepoint configurations, and regime
//! partitions.
//!
//! Conventions used everywhere in this crate:
//!
//! * Observations are indexed `1..=N`. A changepoint at `tau` means the mean
//!   level shifts *after* observation `tau`, i.e. `tau` is the last index of
//!   its regime.
//! * Index 1 is never a changepoint, so admissible changepoint indices live
//!   in `{2..=N}` and there are `2^(N-1)` distinct configurations.
//! * A changepoint at `tau == N` is admissible as a configuration (it is part
//!   of the `2^(N-1)` count) but cannot be partitioned or fitted: it would
//!   create an empty final regime, and the minimum regime length is one
//!   observation. [`partition`] rejects it with a configuration error, and
//!   the search routines treat such configurations as infeasible.

use crate::error::{Result, ShiftscanError};

/// Whether a series holds real-valued measurements or event counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Real-valued observations (temperatures, anomalies, differences, ...).
    Continuous,
    /// Nonnegative integer event counts (e.g. storm counts per season).
    Count,
}

/// An observed time series: values paired with strictly increasing integer
/// time labels (years, season indices, ...).
///
/// Positional indices (`1..=N`) drive all changepoint arithmetic; the time
/// labels ride along for reporting, for tracing simulated data back to its
/// generator, and for aligning two series that cover different windows.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    times: Vec<i64>,
    kind: SeriesKind,
}

impl Series {
    /// Builds a series after validating the invariants: at least two
    /// observations, finite values, strictly increasing times, and (for
    /// count series) nonnegative integer values.
    pub fn new(values: Vec<f64>, times: Vec<i64>, kind: SeriesKind) -> Result<Self> {
        if values.len() < 2 {
            return Err(ShiftscanError::invalid_series(format!(
                "need at least 2 observations, got {}",
                values.len()
            )));
        }
        if values.len() != times.len() {
            return Err(ShiftscanError::invalid_series(format!(
                "{} values but {} time labels",
                values.len(),
                times.len()
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(ShiftscanError::invalid_series(format!(
                    "non-finite value {v} at position {}",
                    i + 1
                )));
            }
        }
        for w in times.windows(2) {
            if w[1] <= w[0] {
                return Err(ShiftscanError::invalid_series(format!(
                    "time labels must be strictly increasing, found {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if kind == SeriesKind::Count {
            for (i, &v) in values.iter().enumerate() {
                if v < 0.0 || v.fract() != 0.0 {
                    return Err(ShiftscanError::InvalidCount(format!(
                        "value {v} at time {} is not a nonnegative integer",
                        times[i]
                    )));
                }
            }
        }
        Ok(Self { values, times, kind })
    }

    /// Continuous series with default time labels `1..=N`.
    pub fn continuous(values: Vec<f64>) -> Result<Self> {
        let times = (1..=values.len() as i64).collect();
        Self::new(values, times, SeriesKind::Continuous)
    }

    /// Count series with default time labels `1..=N`.
    pub fn counts(values: Vec<f64>) -> Result<Self> {
        let times = (1..=values.len() as i64).collect();
        Self::new(values, times, SeriesKind::Count)
    }

    /// Number of observations `N`.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false: construction requires at least two observations.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observation values, index 0 holding observation 1.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Time labels aligned with [`Series::values`].
    pub fn times(&self) -> &[i64] {
        &self.times
    }

    /// Whether the series is continuous or count data.
    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    /// Time label of the 1-based observation index.
    ///
    /// # Panics
    /// Panics if `index` is 0 or greater than `N`.
    pub fn time_at(&self, index: usize) -> i64 {
        self.times[index - 1]
    }
}

/// A set of changepoint indices: strictly increasing and each at least 2.
///
/// The empty configuration (no changepoints, one regime) is valid and is the
/// null model of every search.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChangepointConfiguration {
    taus: Vec<usize>,
}

impl ChangepointConfiguration {
    /// Validates that `taus` is strictly increasing with every entry `>= 2`.
    /// Bounds against a concrete series length are checked separately by
    /// [`ChangepointConfiguration::validate_for`] or [`partition`].
    pub fn new(taus: Vec<usize>) -> Result<Self> {
        for (i, &tau) in taus.iter().enumerate() {
            if tau < 2 {
                return Err(ShiftscanError::invalid_configuration(format!(
                    "changepoint index {tau} is below 2; index 1 can never be a changepoint"
                )));
            }
            if i > 0 && taus[i - 1] >= tau {
                return Err(ShiftscanError::invalid_configuration(format!(
                    "changepoint indices must be strictly increasing, found {} after {}",
                    tau,
                    taus[i - 1]
                )));
            }
        }
        Ok(Self { taus })
    }

    /// The configuration with no changepoints.
    pub fn empty() -> Self {
        Self { taus: Vec::new() }
    }

    /// Changepoint indices, strictly increasing.
    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    /// Number of changepoints `m`.
    pub fn num_changepoints(&self) -> usize {
        self.taus.len()
    }

    /// True when there are no changepoints.
    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    /// Checks every index against a concrete series length.
    pub fn validate_for(&self, n: usize) -> Result<()> {
        if let Some(&last) = self.taus.last() {
            if last > n {
                return Err(ShiftscanError::invalid_configuration(format!(
                    "changepoint index {last} is out of range for a series of length {n}"
                )));
            }
        }
        Ok(())
    }
}

/// The regimes induced by a changepoint configuration: contiguous 1-based
/// inclusive index ranges covering `1..=N` exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimePartition {
    segments: Vec<(usize, usize)>,
}

impl RegimePartition {
    /// Regime index ranges `(start, end)`, 1-based inclusive, in order.
    pub fn segments(&self) -> &[(usize, usize)] {
        &self.segments
    }

    /// Number of regimes (`m + 1`).
    pub fn num_regimes(&self) -> usize {
        self.segments.len()
    }

    /// Recovers the changepoint configuration that produced this partition:
    /// the end of every regime except the last.
    pub fn to_configuration(&self) -> ChangepointConfiguration {
        let taus = self.segments[..self.segments.len() - 1]
            .iter()
            .map(|&(_, end)| end)
            .collect();
        ChangepointConfiguration { taus }
    }

    /// 0-based regime number containing the 1-based observation index.
    ///
    /// # Panics
    /// Panics if `index` lies outside `1..=N`.
    pub fn regime_of(&self, index: usize) -> usize {
        self.segments
            .iter()
            .position(|&(start, end)| start <= index && index <= end)
            .expect("observation index outside the partitioned range")
    }
}

/// Splits `1..=n` at the given changepoints: regime `i` runs from
/// `tau_{i-1} + 1` through `tau_i`, with the final regime ending at `n`.
///
/// Errors when any `tau > n`, and also when `tau == n`: a changepoint at the
/// final observation would leave an empty last regime, and every regime must
/// contain at least one observation.
pub fn partition(config: &ChangepointConfiguration, n: usize) -> Result<RegimePartition> {
    config.validate_for(n)?;
    if config.taus.last() == Some(&n) {
        return Err(ShiftscanError::invalid_configuration(format!(
            "changepoint at the final observation {n} would create an empty last regime"
        )));
    }
    let mut segments = Vec::with_capacity(config.taus.len() + 1);
    let mut start = 1usize;
    for &tau in &config.taus {
        segments.push((start, tau));
        start = tau + 1;
    }
    segments.push((start, n));
    Ok(RegimePartition { segments })
}

/// Iterates over every changepoint configuration for a series of length `n`:
/// all `2^(n-1)` subsets of `{2..=n}`, in ascending bitmask order where bit
/// `j` of the mask corresponds to a changepoint at index `j + 2`.
///
/// # Panics
/// Panics if `n < 2` or `n > 64` (the mask would overflow; exhaustive
/// enumeration long stops being feasible well before that).
pub fn enumerate_configurations(n: usize) -> impl Iterator<Item = ChangepointConfiguration> {
    assert!(
        (2..=64).contains(&n),
        "configuration enumeration requires 2 <= n <= 64, got {n}"
    );
    let count: u64 = 1u64 << (n - 1);
    (0..count).map(move |mask| {
        let mut taus = Vec::with_capacity(mask.count_ones() as usize);
        for j in 0..(n - 1) {
            if mask & (1u64 << j) != 0 {
                taus.push(j + 2);
            }
        }
        ChangepointConfiguration { taus }
    })
}
