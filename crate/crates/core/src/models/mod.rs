// SPDX-License-Identifier: MIT OR Apache-2.0

//! Segment models and penalized-likelihood scoring.
//!
//! A changepoint configuration splits the series into regimes; a segment
//! model assigns each regime its own level (or rate) and yields a maximized
//! log-likelihood. Configurations are compared by
//!
//! ```text
//! total = -2 ln L + penalty,    BIC: m ln N,    AIC: 2 m
//! ```
//!
//! where `m` is the number of changepoints. Only the changepoint count is
//! penalized; the parameters shared by every configuration under the same
//! model (variance, trend, autocorrelation) cancel in comparisons.

mod gauss_iid;
mod poisson;
mod trend_ar1;

pub(crate) use gauss_iid::GaussIidContext;
pub(crate) use poisson::PoissonContext;
pub(crate) use trend_ar1::TrendAr1Context;
pub use trend_ar1::PHI_BOUND;

use crate::error::Result;
use crate::types::{ChangepointConfiguration, Series};

/// Which segment model to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentModelKind {
    /// Independent Gaussian observations with a per-regime mean and a
    /// common variance.
    GaussIid,
    /// Gaussian observations with per-regime intercepts, one shared linear
    /// trend, and stationary AR(1) errors (exact likelihood).
    GaussTrendAr1,
    /// Independent Poisson counts with a per-regime rate.
    Poisson,
}

impl SegmentModelKind {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            SegmentModelKind::GaussIid => "gauss-iid",
            SegmentModelKind::GaussTrendAr1 => "gauss-trend-ar1",
            SegmentModelKind::Poisson => "poisson",
        }
    }
}

/// Which model-complexity penalty to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyKind {
    /// Bayesian information criterion: `m ln N`.
    Bic,
    /// Akaike information criterion: `2 m`.
    Aic,
}

impl PenaltyKind {
    /// Stable lowercase name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            PenaltyKind::Bic => "bic",
            PenaltyKind::Aic => "aic",
        }
    }
}

/// The complexity penalty for `m` changepoints in a series of length `n`.
pub fn penalty(kind: PenaltyKind, m: usize, n: usize) -> f64 {
    match kind {
        PenaltyKind::Bic => m as f64 * (n as f64).ln(),
        PenaltyKind::Aic => 2.0 * m as f64,
    }
}

/// Relative variance floor shared by the Gaussian models: residual variances
/// below `1e-12 * max(x^2)` are clamped so profiled likelihoods stay finite
/// on perfect fits. The floor depends only on the series — never on the
/// configuration — so nested configurations keep their monotone likelihood
/// ordering.
pub(crate) fn variance_floor(values: &[f64]) -> f64 {
    const VARIANCE_FLOOR_RATIO: f64 = 1e-12;
    let scale2 = values.iter().map(|&v| v * v).fold(0.0f64, f64::max);
    if scale2 > 0.0 {
        VARIANCE_FLOOR_RATIO * scale2
    } else {
        // All-zero series: any positive floor works, every configuration
        // fits it perfectly and ranking falls to the penalty.
        VARIANCE_FLOOR_RATIO
    }
}

/// A fitted segment model for one changepoint configuration.
#[derive(Debug, Clone)]
pub struct SegmentFit {
    /// The model that was fit.
    pub kind: SegmentModelKind,
    /// The configuration the fit was computed for.
    pub config: ChangepointConfiguration,
    /// Per-regime levels (Gaussian models) or rates (Poisson), one per regime.
    pub deltas: Vec<f64>,
    /// Shared linear-trend slope, when the model has one.
    pub beta: Option<f64>,
    /// AR(1) coefficient, when the model has one.
    pub phi: Option<f64>,
    /// Maximum-likelihood innovation variance, when the model has one.
    pub sigma2: Option<f64>,
    /// `-2 ln L` at the maximum-likelihood parameters.
    pub neg2loglik: f64,
    /// True when the residual variance collapsed to the numerical floor
    /// (a perfect or near-perfect fit).
    pub degenerate: bool,
}

impl SegmentFit {
    /// The fitted mean (or rate) at every observation index `1..=n`:
    /// `delta_i` for the regime containing `t`, plus `beta * t` when the
    /// model carries a trend.
    pub fn fitted_means(&self, n: usize) -> Result<Vec<f64>> {
        let part = crate::types::partition(&self.config, n)?;
        let beta = self.beta.unwrap_or(0.0);
        let mut out = Vec::with_capacity(n);
        for (regime, &(start, end)) in part.segments().iter().enumerate() {
            for t in start..=end {
                out.push(self.deltas[regime] + beta * t as f64);
            }
        }
        Ok(out)
    }
}

/// A scored configuration: likelihood term, penalty term, and their sum.
#[derive(Debug, Clone, Copy)]
pub struct PenalizedScore {
    /// `-2 ln L` of the fitted segment model.
    pub neg2loglik: f64,
    /// The complexity penalty.
    pub penalty: f64,
    /// `neg2loglik + penalty`; lower is better.
    pub total: f64,
}

/// Fits `kind` to the series under the given changepoint configuration.
pub fn fit(
    series: &Series,
    config: &ChangepointConfiguration,
    kind: SegmentModelKind,
) -> Result<SegmentFit> {
    Objective::new(series, kind)?.fit(config)
}

/// Fits the trend + AR(1) model with the autocorrelation pinned at `phi`
/// instead of profiling it. `phi = 0` reduces to ordinary least squares on
/// per-regime intercepts plus a shared trend.
pub fn fit_gauss_trend_ar1_with_phi(
    series: &Series,
    config: &ChangepointConfiguration,
    phi: f64,
) -> Result<SegmentFit> {
    TrendAr1Context::new(series.values()).fit_with_phi(config, phi)
}

/// Fits and scores a configuration: `-2 ln L` plus the chosen penalty.
pub fn penalized_score(
    series: &Series,
    config: &ChangepointConfiguration,
    kind: SegmentModelKind,
    penalty_kind: PenaltyKind,
) -> Result<PenalizedScore> {
    let fit = fit(series, config, kind)?;
    let pen = penalty(penalty_kind, config.num_changepoints(), series.len());
    Ok(PenalizedScore {
        neg2loglik: fit.neg2loglik,
        penalty: pen,
        total: fit.neg2loglik + pen,
    })
}

/// A reusable scorer for one (series, model) pair. Construction does the
/// whole-series precomputation (prefix sums, factorial terms, design
/// moments), after which each configuration is scored in time proportional
/// to its regime count rather than the series length. The search module
/// leans on this: an exhaustive run scores millions of configurations
/// against one context.
pub(crate) enum Objective {
    GaussIid(GaussIidContext),
    Poisson(PoissonContext),
    TrendAr1(TrendAr1Context),
}

impl Objective {
    pub(crate) fn new(series: &Series, kind: SegmentModelKind) -> Result<Self> {
        match kind {
            SegmentModelKind::GaussIid => {
                Ok(Objective::GaussIid(GaussIidContext::new(series.values())))
            }
            SegmentModelKind::Poisson => {
                Ok(Objective::Poisson(PoissonContext::new(series.values())?))
            }
            SegmentModelKind::GaussTrendAr1 => {
                Ok(Objective::TrendAr1(TrendAr1Context::new(series.values())))
            }
        }
    }

    /// `-2 ln L` for one configuration; errors propagate for configurations
    /// the model cannot fit (empty regime, too few observations, singular
    /// design), which the searches treat as infeasible.
    pub(crate) fn neg2loglik(&self, config: &ChangepointConfiguration) -> Result<f64> {
        match self {
            Objective::GaussIid(ctx) => ctx.neg2loglik(config),
            Objective::Poisson(ctx) => ctx.neg2loglik(config),
            Objective::TrendAr1(ctx) => ctx.neg2loglik(config),
        }
    }

    pub(crate) fn fit(&self, config: &ChangepointConfiguration) -> Result<SegmentFit> {
        match self {
            Objective::GaussIid(ctx) => ctx.fit(config),
            Objective::Poisson(ctx) => ctx.fit(config),
            Objective::TrendAr1(ctx) => ctx.fit(config),
        }
    }

}
