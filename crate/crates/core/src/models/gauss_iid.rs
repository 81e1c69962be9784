// SPDX-License-Identifier: MIT OR Apache-2.0

//! Gaussian i.i.d. segment model: one mean per regime, one shared variance.
//!
//! With `sigma^2` profiled out by its maximum-likelihood (divisor `N`)
//! estimate, the deviance reduces to
//!
//! ```text
//! -2 ln L = N ln(2 pi sigma_hat^2) + N,    sigma_hat^2 = RSS / N
//! ```
//!
//! so ranking configurations only needs per-regime residual sums of squares,
//! which prefix sums deliver in constant time per regime.

use crate::accum::{prefix_sums, CompensatedSum};
use crate::error::Result;
use crate::models::{variance_floor, SegmentFit, SegmentModelKind};
use crate::types::{partition, ChangepointConfiguration};

/// Whole-series precomputation for the Gaussian i.i.d. model.
pub(crate) struct GaussIidContext {
    n: usize,
    /// Prefix sums of the raw values; segment means come from these so that
    /// exactly representable data yields exactly representable levels.
    prefix: Vec<f64>,
    /// Prefix sums of deviations from the global mean, and of their squares.
    /// Residual sums of squares come from these: the shortcut `s2 - s^2/len`
    /// loses its digits to cancellation when a regime's mean dwarfs its
    /// spread, and working in deviations (which leave every regime's RSS
    /// unchanged) keeps it well-conditioned.
    centered_prefix: Vec<f64>,
    centered_prefix_sq: Vec<f64>,
    floor: f64,
}

impl GaussIidContext {
    pub(crate) fn new(values: &[f64]) -> Self {
        let center = if values.is_empty() {
            0.0
        } else {
            crate::accum::sum(values) / values.len() as f64
        };
        let centered: Vec<f64> = values.iter().map(|&v| v - center).collect();
        let squares: Vec<f64> = centered.iter().map(|&v| v * v).collect();
        Self {
            n: values.len(),
            prefix: prefix_sums(values),
            centered_prefix: prefix_sums(&centered),
            centered_prefix_sq: prefix_sums(&squares),
            floor: variance_floor(values),
        }
    }

    fn segment_sum(&self, start: usize, end: usize) -> f64 {
        self.prefix[end] - self.prefix[start - 1]
    }

    /// Residual sum of squares with each regime at its own mean.
    fn rss(&self, segments: &[(usize, usize)]) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(start, end) in segments {
            let len = (end - start + 1) as f64;
            let s = self.centered_prefix[end] - self.centered_prefix[start - 1];
            let s2 = self.centered_prefix_sq[end] - self.centered_prefix_sq[start - 1];
            acc.add((s2 - s * s / len).max(0.0));
        }
        acc.value()
    }

    fn clamped_sigma2(&self, rss: f64) -> (f64, bool) {
        let raw = rss / self.n as f64;
        if raw < self.floor {
            (self.floor, true)
        } else {
            (raw, false)
        }
    }

    pub(crate) fn neg2loglik(&self, config: &ChangepointConfiguration) -> Result<f64> {
        let part = partition(config, self.n)?;
        let (sigma2, _) = self.clamped_sigma2(self.rss(part.segments()));
        let n = self.n as f64;
        Ok(n * (2.0 * std::f64::consts::PI * sigma2).ln() + n)
    }

    pub(crate) fn fit(&self, config: &ChangepointConfiguration) -> Result<SegmentFit> {
        let part = partition(config, self.n)?;
        let deltas = part
            .segments()
            .iter()
            .map(|&(start, end)| self.segment_sum(start, end) / (end - start + 1) as f64)
            .collect();
        let (sigma2, degenerate) = self.clamped_sigma2(self.rss(part.segments()));
        let n = self.n as f64;
        Ok(SegmentFit {
            kind: SegmentModelKind::GaussIid,
            config: config.clone(),
            deltas,
            beta: None,
            phi: None,
            sigma2: Some(sigma2),
            neg2loglik: n * (2.0 * std::f64::consts::PI * sigma2).ln() + n,
            degenerate,
        })
    }
}
