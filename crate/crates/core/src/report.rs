// SPDX-License-Identifier: MIT OR Apache-2.0

//! Report structures emitted by the command line interface.
//!
//! Every report serializes to JSON with `schema_version` as its first field
//! and the wall-clock runtime as its last, so downstream consumers can pin
//! the shape and tests can strip the one nondeterministic field. Each report
//! also renders to a flat `key,value` CSV for spreadsheet use, with list
//! fields joined by semicolons.

use serde::{Deserialize, Serialize};

/// Version stamp for the JSON report shapes below.
pub const SCHEMA_VERSION: u32 = 1;

fn is_false(flag: &bool) -> bool {
    !*flag
}

/// Joins list entries with semicolons for the CSV rendering.
fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

fn push_row(out: &mut String, key: &str, value: impl std::fmt::Display) {
    out.push_str(key);
    out.push(',');
    out.push_str(&value.to_string());
    out.push('\n');
}

fn push_opt_row(out: &mut String, key: &str, value: &Option<impl std::fmt::Display>) {
    if let Some(v) = value {
        push_row(out, key, v);
    }
}

/// Result of a `detect` run, covering every detection method; fields that a
/// method does not produce are omitted from the JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectReport {
    /// Report shape version; always [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Detection method name (`amoc`, `binseg`, `wbs`, `exhaustive`, `ga`).
    pub method: String,
    /// Segment model name, for model-based methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Penalty name, for model-based methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty: Option<String>,
    /// Confidence level, for test-based methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
    /// Flagging threshold, for wild binary segmentation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    /// Number of random intervals, for wild binary segmentation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intervals: Option<usize>,
    /// Minimum segment length, for segmentation methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_len: Option<usize>,
    /// Random seed, for randomized methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Exhaustive-search size cap, when one was supplied.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_n: Option<usize>,
    /// Number of observations.
    pub n: usize,
    /// Detected changepoints as 1-based indices (each the last index of its
    /// regime), ascending.
    pub changepoint_indices: Vec<usize>,
    /// The same changepoints as time labels from the input.
    pub changepoint_times: Vec<i64>,
    /// Number of detected changepoints.
    pub num_changepoints: usize,
    /// Estimated regime levels, one per regime, for model-based methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime_levels: Option<Vec<f64>>,
    /// Estimated shared trend slope, when the model has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Estimated autocorrelation, when the model has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// Estimated innovation or residual variance, for Gaussian models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    /// Model badness-of-fit at the reported configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub neg2loglik: Option<f64>,
    /// Penalty value at the reported configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub penalty_value: Option<f64>,
    /// Penalized total at the reported configuration.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total: Option<f64>,
    /// Whether the single-changepoint test rejected, for `amoc`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reject: Option<bool>,
    /// Critical value the test statistic was compared against.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub critical_value: Option<f64>,
    /// Maximum absolute test statistic, for `amoc`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs: Option<f64>,
    /// Number of configurations scored, for search methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluations: Option<u64>,
    /// Warning for degenerate inputs handled gracefully.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
    /// Wall-clock runtime in seconds; nondeterministic, always last.
    pub runtime_seconds: f64,
}

impl DetectReport {
    /// Renders the report as `key,value` CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        push_row(&mut out, "schema_version", self.schema_version);
        push_row(&mut out, "method", &self.method);
        push_opt_row(&mut out, "model", &self.model);
        push_opt_row(&mut out, "penalty", &self.penalty);
        push_opt_row(&mut out, "level", &self.level);
        push_opt_row(&mut out, "threshold", &self.threshold);
        push_opt_row(&mut out, "intervals", &self.intervals);
        push_opt_row(&mut out, "min_len", &self.min_len);
        push_opt_row(&mut out, "seed", &self.seed);
        push_opt_row(&mut out, "max_n", &self.max_n);
        push_row(&mut out, "n", self.n);
        push_row(&mut out, "changepoint_indices", join(&self.changepoint_indices));
        push_row(&mut out, "changepoint_times", join(&self.changepoint_times));
        push_row(&mut out, "num_changepoints", self.num_changepoints);
        if let Some(levels) = &self.regime_levels {
            push_row(&mut out, "regime_levels", join(levels));
        }
        push_opt_row(&mut out, "beta", &self.beta);
        push_opt_row(&mut out, "phi", &self.phi);
        push_opt_row(&mut out, "sigma2", &self.sigma2);
        push_opt_row(&mut out, "neg2loglik", &self.neg2loglik);
        push_opt_row(&mut out, "penalty_value", &self.penalty_value);
        push_opt_row(&mut out, "total", &self.total);
        push_opt_row(&mut out, "reject", &self.reject);
        push_opt_row(&mut out, "critical_value", &self.critical_value);
        push_opt_row(&mut out, "max_abs", &self.max_abs);
        push_opt_row(&mut out, "evaluations", &self.evaluations);
        push_opt_row(&mut out, "warning", &self.warning);
        push_row(&mut out, "runtime_seconds", self.runtime_seconds);
        out
    }
}

/// One level's worth of simulated critical value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CritvalRow {
    /// Confidence level.
    pub level: f64,
    /// Monte Carlo estimate of the critical value.
    pub simulated: f64,
    /// Built-in asymptotic value, when the level has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asymptotic: Option<f64>,
    /// `simulated - asymptotic`, when the level has a built-in value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub difference: Option<f64>,
}

/// Result of a `critvals` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CritvalsReport {
    /// Report shape version; always [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Series length each replicate simulated.
    pub n: usize,
    /// Number of Monte Carlo replicates.
    pub reps: usize,
    /// Random seed.
    pub seed: u64,
    /// One row per requested level, in request order.
    pub rows: Vec<CritvalRow>,
    /// Wall-clock runtime in seconds; nondeterministic, always last.
    pub runtime_seconds: f64,
}

impl CritvalsReport {
    /// Renders the report as CSV with one row per level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,simulated,asymptotic,difference\n");
        for row in &self.rows {
            let asym = row.asymptotic.map_or_else(String::new, |v| v.to_string());
            let diff = row.difference.map_or_else(String::new, |v| v.to_string());
            out.push_str(&format!("{},{},{},{}\n", row.level, row.simulated, asym, diff));
        }
        out
    }
}

/// Ground-truth summary of a `simulate` run (written to stderr while the
/// series itself goes to the output file or stdout).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulateReport {
    /// Report shape version; always [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Generating model name.
    pub model: String,
    /// Number of observations.
    pub n: usize,
    /// True changepoints as 1-based indices.
    pub taus: Vec<usize>,
    /// True per-regime levels (means or rates).
    pub levels: Vec<f64>,
    /// True trend slope, when the model has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// True autocorrelation, when the model has one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    /// True innovation standard deviation, for Gaussian models.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Random seed.
    pub seed: u64,
}

/// Summary of a `diff` run (the differenced series goes to the output file
/// or stdout).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiffReport {
    /// Report shape version; always [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Identifier of the target series.
    pub target: String,
    /// Identifier of the reference series.
    pub reference: String,
    /// Number of shared time labels.
    pub overlap: usize,
    /// First shared time label.
    pub first_time: i64,
    /// Last shared time label.
    pub last_time: i64,
}

/// Summary of an `adjust` run (the adjusted series goes to the output file
/// or stdout).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdjustReport {
    /// Report shape version; always [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Where the changepoint configuration came from (a method name or
    /// `manual`).
    pub source: String,
    /// Segment model used to estimate regime levels.
    pub model: String,
    /// Anchor regime whose level is preserved.
    pub anchor: String,
    /// Changepoints applied, as 1-based indices.
    pub changepoint_indices: Vec<usize>,
    /// Estimated regime levels before adjustment.
    pub regime_levels: Vec<f64>,
    /// Per-regime offsets subtracted from the data.
    pub offsets: Vec<f64>,
    /// True when the configuration was empty and the series was returned
    /// unchanged.
    #[serde(skip_serializing_if = "is_false")]
    pub unchanged: bool,
}
