// SPDX-License-Identifier: MIT OR Apache-2.0

//! Recursive segmentation for multiple changepoints: plain binary
//! segmentation and wild binary segmentation (WBS).
//!
//! Binary segmentation applies the CUSUM test to the working segment,
//! splits at the flagged index when the statistic exceeds the critical
//! value, and recurses into both halves. It is fast but greedy: the first
//! split must be visible in the whole-segment statistic.
//!
//! WBS additionally evaluates the CUSUM statistic on randomly drawn
//! sub-intervals of the working segment and splits at the argmax of the
//! best-scoring candidate. Localized or mutually cancelling shifts that the
//! whole-segment statistic misses are usually visible in some shorter
//! interval. With zero random intervals WBS reduces exactly to binary
//! segmentation.
//!
//! Both methods record a trace of every interval examined, in order, for
//! diagnostics and reporting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cusum::{max_abs_cusum, ConfidenceLevel};
use crate::error::{Result, ShiftscanError};
use crate::types::{ChangepointConfiguration, Series};

/// Default minimum segment length examined by either method.
pub const DEFAULT_MIN_LEN: usize = 3;

/// Default number of random intervals drawn by WBS.
pub const DEFAULT_NUM_INTERVALS: usize = 500;

/// How an examined interval was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalSource {
    /// The working segment of the recursion itself.
    Working,
    /// A randomly drawn sub-interval (WBS only).
    Random,
}

/// One interval examination in the segmentation trace.
#[derive(Debug, Clone)]
pub struct TraceEntry {
    /// Interval start, 1-based inclusive, in whole-series coordinates.
    pub start: usize,
    /// Interval end, 1-based inclusive.
    pub end: usize,
    /// Whether this was the working segment or a random draw.
    pub source: IntervalSource,
    /// The interval's `max |CUSUM|`, or `None` when the interval is
    /// degenerate (numerically constant).
    pub stat: Option<f64>,
    /// The maximizing index in whole-series coordinates, when defined.
    pub tau: Option<usize>,
    /// True when this interval's argmax was accepted as a changepoint.
    pub flagged: bool,
}

/// Ordered log of every interval either method examined.
#[derive(Debug, Clone, Default)]
pub struct SegmentationTrace {
    entries: Vec<TraceEntry>,
}

impl SegmentationTrace {
    /// The examined intervals, in examination order.
    pub fn entries(&self) -> &[TraceEntry] {
        &self.entries
    }
}

/// The changepoints a segmentation found, plus its examination trace.
#[derive(Debug, Clone)]
pub struct SegmentationResult {
    /// Flagged changepoints, sorted ascending.
    pub config: ChangepointConfiguration,
    /// Every interval examined, in order.
    pub trace: SegmentationTrace,
}

/// Tuning knobs for wild binary segmentation.
#[derive(Debug, Clone)]
pub struct WbsSettings {
    /// Number of random intervals drawn over the whole series.
    pub num_intervals: usize,
    /// Threshold on `max |CUSUM|`; the customary choice is the 95% critical
    /// value of the AMOC test.
    pub threshold: f64,
    /// Minimum segment length examined or drawn.
    pub min_len: usize,
    /// Seed for the interval draws.
    pub seed: u64,
}

impl Default for WbsSettings {
    fn default() -> Self {
        Self {
            num_intervals: DEFAULT_NUM_INTERVALS,
            threshold: ConfidenceLevel::P95.critical_value(),
            min_len: DEFAULT_MIN_LEN,
            seed: 0,
        }
    }
}

/// Recursive binary segmentation with the AMOC test at `level`.
///
/// Recursion stops on segments shorter than `min_len` (or shorter than 2,
/// where the statistic is undefined), on segments whose test does not
/// reject, and on degenerate segments.
pub fn binary_segmentation(
    series: &Series,
    level: ConfidenceLevel,
    min_len: usize,
) -> Result<SegmentationResult> {
    let mut taus = Vec::new();
    let mut trace = SegmentationTrace::default();
    let n = series.len();
    recurse(
        series.values(),
        1,
        n,
        &Candidates::WorkingOnly,
        level.critical_value(),
        min_len.max(2),
        &mut taus,
        &mut trace,
    );
    finish(taus, trace)
}

/// Wild binary segmentation: every recursion step scores the working
/// segment plus all drawn intervals falling inside it, and splits at the
/// argmax of the best candidate when it clears `settings.threshold`.
///
/// With `num_intervals == 0` this is exactly binary segmentation at the
/// same threshold.
pub fn wild_binary_segmentation(
    series: &Series,
    settings: &WbsSettings,
) -> Result<SegmentationResult> {
    if !(settings.threshold.is_finite() && settings.threshold > 0.0) {
        return Err(ShiftscanError::invalid_parameter(format!(
            "WBS threshold must be a positive number, got {}",
            settings.threshold
        )));
    }
    let n = series.len();
    let min_len = settings.min_len.max(2);
    let draws = draw_intervals(n, settings.num_intervals, min_len, settings.seed);

    let mut taus = Vec::new();
    let mut trace = SegmentationTrace::default();
    recurse(
        series.values(),
        1,
        n,
        &Candidates::WithDraws(&draws),
        settings.threshold,
        min_len,
        &mut taus,
        &mut trace,
    );
    finish(taus, trace)
}

/// Draws `count` intervals uniformly from the admissible pairs
/// `{(s, e): 1 <= s < e <= n, e - s + 1 >= min_len}` by rejection sampling,
/// with replacement. Returns an empty vector when no pair is admissible.
fn draw_intervals(n: usize, count: usize, min_len: usize, seed: u64) -> Vec<(usize, usize)> {
    if min_len > n {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(count);
    for _ in 0..count {
        loop {
            let s = rng.random_range(1..=n);
            let e = rng.random_range(1..=n);
            if s < e && e - s + 1 >= min_len {
                draws.push((s, e));
                break;
            }
        }
    }
    draws
}

enum Candidates<'a> {
    WorkingOnly,
    WithDraws(&'a [(usize, usize)]),
}

#[allow(clippy::too_many_arguments)]
fn recurse(
    values: &[f64],
    lo: usize,
    hi: usize,
    candidates: &Candidates<'_>,
    threshold: f64,
    min_len: usize,
    taus: &mut Vec<usize>,
    trace: &mut SegmentationTrace,
) {
    if hi - lo + 1 < min_len {
        return;
    }

    // Examine the working segment first, then any draws inside it.
    let first_entry = trace.entries.len();
    let mut best: Option<(usize, usize, f64)> = None; // (entry idx, tau, stat)
    let examine = |start: usize, end: usize, source: IntervalSource,
                       trace: &mut SegmentationTrace,
                       best: &mut Option<(usize, usize, f64)>| {
        let entry_idx = trace.entries.len();
        match max_abs_cusum(&values[start - 1..end]) {
            None => trace.entries.push(TraceEntry {
                start,
                end,
                source,
                stat: None,
                tau: None,
                flagged: false,
            }),
            Some((tau_local, stat)) => {
                let tau = start - 1 + tau_local;
                trace.entries.push(TraceEntry {
                    start,
                    end,
                    source,
                    stat: Some(stat),
                    tau: Some(tau),
                    flagged: false,
                });
                // Strict comparison: ties keep the earliest-examined interval.
                if best.as_ref().is_none_or(|&(_, _, b)| stat > b) {
                    *best = Some((entry_idx, tau, stat));
                }
            }
        }
    };

    examine(lo, hi, IntervalSource::Working, trace, &mut best);
    if let Candidates::WithDraws(draws) = candidates {
        for &(s, e) in draws.iter() {
            if lo <= s && e <= hi {
                examine(s, e, IntervalSource::Random, trace, &mut best);
            }
        }
    }
    debug_assert!(trace.entries.len() > first_entry);

    let Some((entry_idx, tau, stat)) = best else {
        return; // every candidate was degenerate
    };
    if stat <= threshold {
        return;
    }
    trace.entries[entry_idx].flagged = true;
    taus.push(tau);
    recurse(values, lo, tau, candidates, threshold, min_len, taus, trace);
    recurse(values, tau + 1, hi, candidates, threshold, min_len, taus, trace);
}

fn finish(mut taus: Vec<usize>, trace: SegmentationTrace) -> Result<SegmentationResult> {
    taus.sort_unstable();
    let config = ChangepointConfiguration::new(taus)
        .expect("flagged changepoints are interior to disjoint segments");
    Ok(SegmentationResult { config, trace })
}
