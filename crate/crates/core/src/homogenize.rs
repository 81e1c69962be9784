// SPDX-License-Identifier: MIT OR Apache-2.0

//! Homogenization helpers: difference series against a reference, and
//! removal of fitted mean shifts.
//!
//! Relative homogeneity testing compares a target series against a trusted
//! neighbor: differencing at shared time labels cancels the regional signal
//! (weather, climate trend) and leaves station-specific artifacts such as
//! instrument moves. Once shifts are estimated, [`adjust`] subtracts the
//! fitted level differences so every regime is expressed on the scale of a
//! chosen anchor regime.

use crate::error::{Result, ShiftscanError};
use crate::models::SegmentFit;
use crate::types::{partition, Series, SeriesKind};

/// The difference between a target and a reference series at their shared
/// time labels, tagged with both series' identifiers.
#[derive(Debug, Clone)]
pub struct DifferenceSeries {
    /// `target - reference` at every shared time label.
    pub series: Series,
    /// Identifier of the target series (file stem, station id, ...).
    pub target_id: String,
    /// Identifier of the reference series.
    pub reference_id: String,
}

/// Builds `target - reference` over the intersection of their time labels.
///
/// Both inputs must be continuous series, and they must share at least two
/// time labels.
pub fn difference(
    target: &Series,
    reference: &Series,
    target_id: impl Into<String>,
    reference_id: impl Into<String>,
) -> Result<DifferenceSeries> {
    if target.kind() != SeriesKind::Continuous || reference.kind() != SeriesKind::Continuous {
        return Err(ShiftscanError::invalid_series(
            "difference requires two continuous series",
        ));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    let (mut i, mut j) = (0usize, 0usize);
    let (t_times, r_times) = (target.times(), reference.times());
    while i < t_times.len() && j < r_times.len() {
        match t_times[i].cmp(&r_times[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                times.push(t_times[i]);
                values.push(target.values()[i] - reference.values()[j]);
                i += 1;
                j += 1;
            }
        }
    }
    if times.len() < 2 {
        return Err(ShiftscanError::InsufficientOverlap { found: times.len() });
    }
    Ok(DifferenceSeries {
        series: Series::new(values, times, SeriesKind::Continuous)?,
        target_id: target_id.into(),
        reference_id: reference_id.into(),
    })
}

/// Which regime's level the adjusted series is anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Anchor {
    /// Express every regime on the level of the first regime.
    FirstRegime,
    /// Express every regime on the level of the last regime (the usual
    /// choice: recent observations keep their face value).
    #[default]
    LastRegime,
}

impl Anchor {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Anchor::FirstRegime => "first-regime",
            Anchor::LastRegime => "last-regime",
        }
    }
}

/// Subtracts the fitted level differences from a series: observation `t` in
/// regime `i` becomes `x_t - (delta_i - delta_anchor)`, so the anchor
/// regime is untouched and every other regime is re-expressed on its level.
///
/// A fit with no changepoints returns an exact clone of the input. Any
/// trend in the fit stays in the data — only level shifts are removed. The
/// output is a continuous series (adjusted counts are generally no longer
/// integers) except for the clone case, which preserves the input kind.
pub fn adjust(series: &Series, fit: &SegmentFit, anchor: Anchor) -> Result<Series> {
    let n = series.len();
    let part = partition(&fit.config, n)?;
    if fit.deltas.len() != part.num_regimes() {
        return Err(ShiftscanError::invalid_parameter(format!(
            "fit carries {} level(s) but the configuration has {} regime(s)",
            fit.deltas.len(),
            part.num_regimes()
        )));
    }
    if fit.config.is_empty() {
        return Ok(series.clone());
    }
    let anchor_level = match anchor {
        Anchor::FirstRegime => fit.deltas[0],
        Anchor::LastRegime => fit.deltas[fit.deltas.len() - 1],
    };
    let mut values = Vec::with_capacity(n);
    for (regime, &(start, end)) in part.segments().iter().enumerate() {
        let offset = fit.deltas[regime] - anchor_level;
        for t in start..=end {
            values.push(series.values()[t - 1] - offset);
        }
    }
    Series::new(values, series.times().to_vec(), SeriesKind::Continuous)
}
