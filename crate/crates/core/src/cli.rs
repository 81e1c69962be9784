// SPDX-License-Identifier: MIT OR Apache-2.0

//! Command line interface.
//!
//! Five subcommands: `detect` runs a detection method over a CSV series and
//! prints a report, `critvals` simulates critical values for the CUSUM test,
//! `simulate` draws synthetic series, `diff` builds a target-minus-reference
//! difference series, and `adjust` removes estimated level shifts from a
//! series. Reports go to stdout (or `--out`); `simulate`, `diff`, and
//! `adjust` write their series to stdout (or `--out`) and a JSON summary to
//! stderr.
//!
//! Exit codes: 0 on success, 1 for data errors (unreadable or malformed
//! input, insufficient overlap, singular fits), 2 for usage errors (unknown
//! flags, flags that do not apply to the chosen method, parameters outside
//! their domain).

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cusum::{self, ConfidenceLevel};
use crate::error::{Result, ShiftscanError};
use crate::homogenize::{self, Anchor};
use crate::ingest;
use crate::models::{self, PenaltyKind, SegmentFit, SegmentModelKind};
use crate::report::{
    AdjustReport, CritvalRow, CritvalsReport, DetectReport, DiffReport, SimulateReport,
    SCHEMA_VERSION,
};
use crate::search::{self, GaSettings};
use crate::segmentation::{self, WbsSettings, DEFAULT_MIN_LEN, DEFAULT_NUM_INTERVALS};
use crate::simulate::{self, SimulationSpec};
use crate::types::{ChangepointConfiguration, SeriesKind};

/// Default confidence level for test-based methods.
const DEFAULT_LEVEL: f64 = 0.95;

#[derive(Parser)]
#[command(
    name = "shiftscan",
    version,
    about = "Changepoint detection and homogenization for annual time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect changepoints in a CSV series.
    Detect(DetectArgs),
    /// Simulate critical values for the CUSUM test.
    Critvals(CritvalsArgs),
    /// Draw a synthetic series from a segment model.
    Simulate(SimulateArgs),
    /// Difference a target series against a reference series.
    Diff(DiffArgs),
    /// Remove estimated level shifts from a series.
    Adjust(AdjustArgs),
}

/// Detection method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    /// CUSUM test for at most one changepoint.
    Amoc,
    /// Recursive binary segmentation with the CUSUM test.
    Binseg,
    /// Wild binary segmentation over random intervals.
    Wbs,
    /// Penalized-likelihood search over every configuration.
    Exhaustive,
    /// Penalized-likelihood search with a genetic algorithm.
    Ga,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Amoc => "amoc",
            MethodArg::Binseg => "binseg",
            MethodArg::Wbs => "wbs",
            MethodArg::Exhaustive => "exhaustive",
            MethodArg::Ga => "ga",
        }
    }

    fn is_model_based(self) -> bool {
        matches!(self, MethodArg::Exhaustive | MethodArg::Ga)
    }
}

/// How the input values are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    /// Real-valued observations.
    Continuous,
    /// Nonnegative integer counts.
    Count,
}

impl KindArg {
    fn to_series_kind(self) -> SeriesKind {
        match self {
            KindArg::Continuous => SeriesKind::Continuous,
            KindArg::Count => SeriesKind::Count,
        }
    }
}

/// Report output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    /// Pretty-printed JSON.
    Json,
    /// Flat `key,value` CSV.
    Csv,
}

/// Segment model selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Per-regime means with i.i.d. Gaussian noise.
    #[value(name = "gauss-iid")]
    GaussIid,
    /// Per-regime levels plus a shared trend with AR(1) Gaussian noise.
    #[value(name = "gauss-trend-ar1")]
    GaussTrendAr1,
    /// Per-regime Poisson rates for count data.
    Poisson,
}

impl ModelArg {
    fn to_model_kind(self) -> SegmentModelKind {
        match self {
            ModelArg::GaussIid => SegmentModelKind::GaussIid,
            ModelArg::GaussTrendAr1 => SegmentModelKind::GaussTrendAr1,
            ModelArg::Poisson => SegmentModelKind::Poisson,
        }
    }
}

/// Penalty selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PenaltyArg {
    /// Bayesian information criterion.
    Bic,
    /// Akaike information criterion.
    Aic,
}

impl PenaltyArg {
    fn to_penalty_kind(self) -> PenaltyKind {
        match self {
            PenaltyArg::Bic => PenaltyKind::Bic,
            PenaltyArg::Aic => PenaltyKind::Aic,
        }
    }
}

/// Anchor regime selector for `adjust`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AnchorArg {
    /// Preserve the last regime's level.
    Last,
    /// Preserve the first regime's level.
    First,
}

impl AnchorArg {
    fn to_anchor(self) -> Anchor {
        match self {
            AnchorArg::Last => Anchor::LastRegime,
            AnchorArg::First => Anchor::FirstRegime,
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Input CSV file with `time,value` rows.
    #[arg(long)]
    input: PathBuf,

    /// Detection method.
    #[arg(long)]
    method: MethodArg,

    /// How to interpret the values.
    #[arg(long, value_enum, default_value_t = KindArg::Continuous)]
    kind: KindArg,

    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Write a `time,observed,fitted` CSV of the fitted step function here.
    #[arg(long)]
    fitted_out: Option<PathBuf>,

    /// Confidence level for the CUSUM test (amoc, binseg). [default: 0.95]
    #[arg(long)]
    level: Option<f64>,

    /// Minimum segment length (binseg, wbs). [default: 3]
    #[arg(long)]
    min_len: Option<usize>,

    /// Flagging threshold on max |CUSUM| (wbs). [default: 1.358]
    #[arg(long)]
    threshold: Option<f64>,

    /// Number of random intervals (wbs). [default: 500]
    #[arg(long)]
    intervals: Option<usize>,

    /// Random seed (wbs, ga). [default: 0]
    #[arg(long)]
    seed: Option<u64>,

    /// Segment model (exhaustive, ga). [default: gauss-iid]
    #[arg(long, value_enum)]
    model: Option<ModelArg>,

    /// Penalty (exhaustive, ga). [default: bic]
    #[arg(long, value_enum)]
    penalty: Option<PenaltyArg>,

    /// Override the exhaustive-search series-length cap (exhaustive).
    #[arg(long)]
    max_n: Option<usize>,

    /// Chromosomes per generation (ga). [default: 100]
    #[arg(long)]
    population: Option<usize>,

    /// Maximum generations (ga). [default: 500]
    #[arg(long)]
    generations: Option<usize>,

    /// Generations without improvement before stopping (ga). [default: 50]
    #[arg(long)]
    stagnation: Option<usize>,

    /// Probability a child comes from crossover (ga). [default: 0.9]
    #[arg(long)]
    crossover_rate: Option<f64>,

    /// Per-bit mutation probability (ga). [default: 1/(N-1)]
    #[arg(long)]
    mutation_rate: Option<f64>,

    /// Chromosomes copied unchanged each generation (ga). [default: 2]
    #[arg(long)]
    elitism: Option<usize>,
}

#[derive(Args)]
struct CritvalsArgs {
    /// Length of each simulated series.
    #[arg(long, default_value_t = 2000)]
    n: usize,

    /// Number of Monte Carlo replicates.
    #[arg(long, default_value_t = 100_000)]
    reps: usize,

    /// Comma-separated confidence levels.
    #[arg(long, default_value = "0.90,0.95,0.975,0.99")]
    levels: String,

    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Generating model.
    #[arg(long, value_enum, default_value_t = ModelArg::GaussIid)]
    model: ModelArg,

    /// Series length.
    #[arg(long)]
    n: usize,

    /// Comma-separated true changepoints (1-based indices, each the last
    /// index of its regime).
    #[arg(long)]
    taus: Option<String>,

    /// Comma-separated per-regime means (Gaussian models); one per regime.
    #[arg(long)]
    deltas: Option<String>,

    /// Comma-separated per-regime rates (poisson); one per regime.
    #[arg(long)]
    rates: Option<String>,

    /// Shared trend slope (gauss-trend-ar1 only).
    #[arg(long)]
    beta: Option<f64>,

    /// AR(1) coefficient (gauss-trend-ar1 only).
    #[arg(long)]
    phi: Option<f64>,

    /// Innovation standard deviation (Gaussian models). [default: 1]
    #[arg(long)]
    sigma: Option<f64>,

    /// Random seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Write the series here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DiffArgs {
    /// Target series CSV.
    #[arg(long)]
    target: PathBuf,

    /// Reference series CSV.
    #[arg(long)]
    reference: PathBuf,

    /// Write the difference series here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AdjustArgs {
    /// Input CSV file with `time,value` rows.
    #[arg(long)]
    input: PathBuf,

    /// How to interpret the values.
    #[arg(long, value_enum, default_value_t = KindArg::Continuous)]
    kind: KindArg,

    /// Detection method that supplies the changepoints (mutually exclusive
    /// with --taus; method parameters take their defaults).
    #[arg(long, value_enum)]
    method: Option<MethodArg>,

    /// Comma-separated changepoints to apply directly (mutually exclusive
    /// with --method).
    #[arg(long)]
    taus: Option<String>,

    /// Segment model used to estimate regime levels. [default: gauss-iid]
    #[arg(long, value_enum)]
    model: Option<ModelArg>,

    /// Penalty for search methods (exhaustive, ga). [default: bic]
    #[arg(long, value_enum)]
    penalty: Option<PenaltyArg>,

    /// Which regime keeps its observed level.
    #[arg(long, value_enum, default_value_t = AnchorArg::Last)]
    anchor: AnchorArg,

    /// Random seed (wbs, ga). [default: 0]
    #[arg(long)]
    seed: Option<u64>,

    /// Override the exhaustive-search series-length cap (exhaustive).
    #[arg(long)]
    max_n: Option<usize>,

    /// Write the adjusted series here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parses arguments from the process environment, runs the requested
/// subcommand, and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            // Requested help/version is a successful run; invoking with no
            // subcommand (clap also answers with the help text) is still a
            // usage error under the exit-code contract.
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Detect(args) => run_detect(args),
        Command::Critvals(args) => run_critvals(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Diff(args) => run_diff(args),
        Command::Adjust(args) => run_adjust(args),
    }
}

/// Maps an error to the documented exit code: 1 for data problems, 2 for
/// usage problems.
fn exit_code_for(err: &ShiftscanError) -> i32 {
    match err {
        ShiftscanError::Parse { .. }
        | ShiftscanError::Io(_)
        | ShiftscanError::InvalidSeries(_)
        | ShiftscanError::InvalidCount(_)
        | ShiftscanError::InsufficientOverlap { .. }
        | ShiftscanError::DegenerateSeries
        | ShiftscanError::SingularFit(_) => 1,
        ShiftscanError::InvalidParameter(_)
        | ShiftscanError::UnsupportedLevel(_)
        | ShiftscanError::SeriesTooLong { .. }
        | ShiftscanError::InvalidConfiguration(_) => 2,
    }
}

/// Writes `text` to `out`, or to stdout when no path was given.
fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render_json<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value)
        .expect("report structs serialize without fallible map keys");
    text.push('\n');
    text
}

fn parse_f64_list(text: &str, flag: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>().map_err(|_| {
                ShiftscanError::invalid_parameter(format!(
                    "{flag}: cannot parse {s:?} as a number"
                ))
            })
        })
        .collect()
}

fn parse_usize_list(text: &str, flag: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>().map_err(|_| {
                ShiftscanError::invalid_parameter(format!(
                    "{flag}: cannot parse {s:?} as an index"
                ))
            })
        })
        .collect()
}

/// Rejects detect flags that do not belong to the chosen method.
fn check_detect_flags(args: &DetectArgs) -> Result<()> {
    use MethodArg::*;
    let method = args.method;
    let matrix: [(&str, bool, bool); 13] = [
        ("--level", args.level.is_some(), matches!(method, Amoc | Binseg)),
        ("--min-len", args.min_len.is_some(), matches!(method, Binseg | Wbs)),
        ("--threshold", args.threshold.is_some(), matches!(method, Wbs)),
        ("--intervals", args.intervals.is_some(), matches!(method, Wbs)),
        ("--seed", args.seed.is_some(), matches!(method, Wbs | Ga)),
        ("--model", args.model.is_some(), method.is_model_based()),
        ("--penalty", args.penalty.is_some(), method.is_model_based()),
        ("--max-n", args.max_n.is_some(), matches!(method, Exhaustive)),
        ("--population", args.population.is_some(), matches!(method, Ga)),
        ("--generations", args.generations.is_some(), matches!(method, Ga)),
        ("--stagnation", args.stagnation.is_some(), matches!(method, Ga)),
        ("--crossover-rate", args.crossover_rate.is_some(), matches!(method, Ga)),
        ("--mutation-rate", args.mutation_rate.is_some(), matches!(method, Ga)),
    ];
    reject_foreign_flags(&matrix, method.name())?;
    if args.elitism.is_some() && method != Ga {
        return Err(foreign_flag("--elitism", method.name()));
    }
    Ok(())
}

fn reject_foreign_flags(matrix: &[(&str, bool, bool)], method: &str) -> Result<()> {
    for &(flag, provided, allowed) in matrix {
        if provided && !allowed {
            return Err(foreign_flag(flag, method));
        }
    }
    Ok(())
}

fn foreign_flag(flag: &str, method: &str) -> ShiftscanError {
    ShiftscanError::invalid_parameter(format!("{flag} does not apply to method {method}"))
}

/// Enforces that the Poisson model only runs on count-ingested data.
fn check_poisson_kind(model: SegmentModelKind, kind: SeriesKind) -> Result<()> {
    if model == SegmentModelKind::Poisson && kind != SeriesKind::Count {
        return Err(ShiftscanError::invalid_parameter(
            "--model poisson requires --kind count",
        ));
    }
    Ok(())
}

/// Warning attached to reports for numerically constant input.
const DEGENERATE_WARNING: &str =
    "series is numerically constant; no changepoint analysis is possible and none are reported";

fn run_detect(args: DetectArgs) -> Result<()> {
    let start = Instant::now();
    check_detect_flags(&args)?;
    let method = args.method;
    let kind = args.kind.to_series_kind();
    let model = args.model.map_or(SegmentModelKind::GaussIid, ModelArg::to_model_kind);
    let penalty_kind = args.penalty.map_or(PenaltyKind::Bic, PenaltyArg::to_penalty_kind);
    if method.is_model_based() {
        check_poisson_kind(model, kind)?;
    }
    let series = ingest::read_series_csv(&args.input, kind)?;
    let n = series.len();

    let mut report = DetectReport {
        schema_version: SCHEMA_VERSION,
        method: method.name().to_string(),
        model: None,
        penalty: None,
        level: None,
        threshold: None,
        intervals: None,
        min_len: None,
        seed: None,
        max_n: None,
        n,
        changepoint_indices: Vec::new(),
        changepoint_times: Vec::new(),
        num_changepoints: 0,
        regime_levels: None,
        beta: None,
        phi: None,
        sigma2: None,
        neg2loglik: None,
        penalty_value: None,
        total: None,
        reject: None,
        critical_value: None,
        max_abs: None,
        evaluations: None,
        warning: None,
        runtime_seconds: 0.0,
    };

    // Record the parameters the run used (resolved defaults included) so the
    // report is self-describing.
    let level = ConfidenceLevel::from_level(args.level.unwrap_or(DEFAULT_LEVEL))?;
    let min_len = args.min_len.unwrap_or(DEFAULT_MIN_LEN);
    match method {
        MethodArg::Amoc => {
            report.level = Some(level.level());
            report.critical_value = Some(level.critical_value());
        }
        MethodArg::Binseg => {
            report.level = Some(level.level());
            report.critical_value = Some(level.critical_value());
            report.min_len = Some(min_len);
        }
        MethodArg::Wbs => {
            report.threshold = Some(args.threshold.unwrap_or(WbsSettings::default().threshold));
            report.intervals = Some(args.intervals.unwrap_or(DEFAULT_NUM_INTERVALS));
            report.min_len = Some(min_len);
            report.seed = Some(args.seed.unwrap_or(0));
        }
        MethodArg::Exhaustive => {
            report.model = Some(model.name().to_string());
            report.penalty = Some(penalty_kind.name().to_string());
            report.max_n = args.max_n;
        }
        MethodArg::Ga => {
            report.model = Some(model.name().to_string());
            report.penalty = Some(penalty_kind.name().to_string());
            report.seed = Some(args.seed.unwrap_or(0));
        }
    }

    let (_, _, input_degenerate) = cusum::null_moments(series.values());
    let mut fit: Option<SegmentFit> = None;

    if input_degenerate {
        // A constant series carries no changepoint signal; report an empty
        // configuration with a warning instead of failing.
        report.warning = Some(DEGENERATE_WARNING.to_string());
        if method.is_model_based() {
            let empty = ChangepointConfiguration::empty();
            let f = models::fit(&series, &empty, model)?;
            let score = models::penalized_score(&series, &empty, model, penalty_kind)?;
            report.regime_levels = Some(f.deltas.clone());
            report.beta = f.beta;
            report.phi = f.phi;
            report.sigma2 = f.sigma2;
            report.neg2loglik = Some(score.neg2loglik);
            report.penalty_value = Some(score.penalty);
            report.total = Some(score.total);
            fit = Some(f);
        }
    } else {
        let config = match method {
            MethodArg::Amoc => {
                let outcome = cusum::amoc_test(&series, level)?;
                report.reject = Some(outcome.reject);
                report.max_abs = Some(outcome.max_abs);
                let taus = if outcome.reject {
                    vec![outcome.tau_hat]
                } else {
                    Vec::new()
                };
                ChangepointConfiguration::new(taus)?
            }
            MethodArg::Binseg => {
                segmentation::binary_segmentation(&series, level, min_len)?.config
            }
            MethodArg::Wbs => {
                let settings = WbsSettings {
                    num_intervals: args.intervals.unwrap_or(DEFAULT_NUM_INTERVALS),
                    threshold: args.threshold.unwrap_or(WbsSettings::default().threshold),
                    min_len,
                    seed: args.seed.unwrap_or(0),
                };
                segmentation::wild_binary_segmentation(&series, &settings)?.config
            }
            MethodArg::Exhaustive => {
                let result = search::exhaustive_search(&series, model, penalty_kind, args.max_n)?;
                report.evaluations = Some(result.evaluations);
                report.neg2loglik = Some(result.best_score.neg2loglik);
                report.penalty_value = Some(result.best_score.penalty);
                report.total = Some(result.best_score.total);
                result.best_config
            }
            MethodArg::Ga => {
                let settings = GaSettings {
                    seed: args.seed.unwrap_or(0),
                    population_size: args.population.unwrap_or_else(|| GaSettings::default().population_size),
                    max_generations: args.generations.unwrap_or_else(|| GaSettings::default().max_generations),
                    stagnation_limit: args.stagnation.unwrap_or_else(|| GaSettings::default().stagnation_limit),
                    crossover_rate: args.crossover_rate.unwrap_or_else(|| GaSettings::default().crossover_rate),
                    mutation_rate: args.mutation_rate,
                    elitism: args.elitism.unwrap_or_else(|| GaSettings::default().elitism),
                };
                let result = search::genetic_search(&series, model, penalty_kind, &settings)?;
                report.evaluations = Some(result.evaluations);
                report.neg2loglik = Some(result.best_score.neg2loglik);
                report.penalty_value = Some(result.best_score.penalty);
                report.total = Some(result.best_score.total);
                result.best_config
            }
        };

        report.changepoint_indices = config.taus().to_vec();
        report.changepoint_times = config.taus().iter().map(|&t| series.time_at(t)).collect();
        report.num_changepoints = config.num_changepoints();

        if method.is_model_based() {
            let f = models::fit(&series, &config, model)?;
            report.regime_levels = Some(f.deltas.clone());
            report.beta = f.beta;
            report.phi = f.phi;
            report.sigma2 = f.sigma2;
            if f.degenerate {
                report.warning = Some(
                    "residual variance collapsed to the numerical floor (a perfect fit); \
                     interpret the likelihood with care"
                        .to_string(),
                );
            }
            fit = Some(f);
        } else if args.fitted_out.is_some() {
            // Test-based methods carry no model; fit per-regime means for
            // the fitted-values file.
            fit = Some(models::fit(&series, &config, SegmentModelKind::GaussIid)?);
        }
    }

    if let Some(path) = &args.fitted_out {
        let f = match &fit {
            Some(f) => f.clone(),
            None => models::fit(
                &series,
                &ChangepointConfiguration::empty(),
                SegmentModelKind::GaussIid,
            )?,
        };
        let fitted = f.fitted_means(n)?;
        std::fs::write(path, ingest::render_fitted_csv(&series, &fitted))?;
    }

    report.runtime_seconds = start.elapsed().as_secs_f64();
    let text = match args.format {
        FormatArg::Json => render_json(&report),
        FormatArg::Csv => report.to_csv(),
    };
    emit(&text, args.out.as_deref())
}

fn run_critvals(args: CritvalsArgs) -> Result<()> {
    let start = Instant::now();
    let levels = parse_f64_list(&args.levels, "--levels")?;
    let estimates = cusum::simulate_critical_values(args.n, args.reps, &levels, args.seed)?;
    let rows: Vec<CritvalRow> = estimates
        .iter()
        .map(|est| {
            let asymptotic = ConfidenceLevel::from_level(est.level)
                .ok()
                .map(ConfidenceLevel::critical_value);
            CritvalRow {
                level: est.level,
                simulated: est.value,
                asymptotic,
                difference: asymptotic.map(|a| est.value - a),
            }
        })
        .collect();
    let report = CritvalsReport {
        schema_version: SCHEMA_VERSION,
        n: args.n,
        reps: args.reps,
        seed: args.seed,
        rows,
        runtime_seconds: start.elapsed().as_secs_f64(),
    };
    let text = match args.format {
        FormatArg::Json => render_json(&report),
        FormatArg::Csv => report.to_csv(),
    };
    emit(&text, args.out.as_deref())
}

fn run_simulate(args: SimulateArgs) -> Result<()> {
    let model = args.model.to_model_kind();
    let taus = match &args.taus {
        Some(text) => parse_usize_list(text, "--taus")?,
        None => Vec::new(),
    };

    // Levels come from --deltas for the Gaussian models and --rates for
    // Poisson; the other flag (and Gaussian-only noise flags, for Poisson)
    // must be absent.
    let levels = match model {
        SegmentModelKind::Poisson => {
            if args.deltas.is_some() {
                return Err(ShiftscanError::invalid_parameter(
                    "--deltas does not apply to model poisson; use --rates",
                ));
            }
            if args.sigma.is_some() {
                return Err(ShiftscanError::invalid_parameter(
                    "--sigma does not apply to model poisson",
                ));
            }
            let rates = args.rates.as_deref().ok_or_else(|| {
                ShiftscanError::invalid_parameter("model poisson requires --rates")
            })?;
            parse_f64_list(rates, "--rates")?
        }
        _ => {
            if args.rates.is_some() {
                return Err(ShiftscanError::invalid_parameter(
                    "--rates only applies to model poisson; use --deltas",
                ));
            }
            let deltas = args.deltas.as_deref().ok_or_else(|| {
                ShiftscanError::invalid_parameter("Gaussian models require --deltas")
            })?;
            parse_f64_list(deltas, "--deltas")?
        }
    };
    if model != SegmentModelKind::GaussTrendAr1 {
        if args.beta.is_some() {
            return Err(ShiftscanError::invalid_parameter(format!(
                "--beta does not apply to model {}",
                model.name()
            )));
        }
        if args.phi.is_some() {
            return Err(ShiftscanError::invalid_parameter(format!(
                "--phi does not apply to model {}",
                model.name()
            )));
        }
    }

    let spec = SimulationSpec {
        kind: model,
        n: args.n,
        taus,
        levels,
        beta: args.beta.unwrap_or(0.0),
        phi: args.phi.unwrap_or(0.0),
        sigma: args.sigma.unwrap_or(1.0),
        seed: args.seed,
    };
    let series = simulate::simulate(&spec)?;

    let gaussian = model != SegmentModelKind::Poisson;
    let report = SimulateReport {
        schema_version: SCHEMA_VERSION,
        model: model.name().to_string(),
        n: spec.n,
        taus: spec.taus.clone(),
        levels: spec.levels.clone(),
        beta: (model == SegmentModelKind::GaussTrendAr1).then_some(spec.beta),
        phi: (model == SegmentModelKind::GaussTrendAr1).then_some(spec.phi),
        sigma: gaussian.then_some(spec.sigma),
        seed: spec.seed,
    };
    emit(&ingest::render_series_csv(&series), args.out.as_deref())?;
    eprint!("{}", render_json(&report));
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn run_diff(args: DiffArgs) -> Result<()> {
    let target = ingest::read_series_csv(&args.target, SeriesKind::Continuous)?;
    let reference = ingest::read_series_csv(&args.reference, SeriesKind::Continuous)?;
    let diff = homogenize::difference(
        &target,
        &reference,
        file_stem(&args.target),
        file_stem(&args.reference),
    )?;
    let times = diff.series.times();
    let report = DiffReport {
        schema_version: SCHEMA_VERSION,
        target: diff.target_id.clone(),
        reference: diff.reference_id.clone(),
        overlap: diff.series.len(),
        first_time: times[0],
        last_time: times[times.len() - 1],
    };
    emit(&ingest::render_series_csv(&diff.series), args.out.as_deref())?;
    eprint!("{}", render_json(&report));
    Ok(())
}

fn run_adjust(args: AdjustArgs) -> Result<()> {
    let kind = args.kind.to_series_kind();
    let model = args.model.map_or(SegmentModelKind::GaussIid, ModelArg::to_model_kind);
    let penalty_kind = args.penalty.map_or(PenaltyKind::Bic, PenaltyArg::to_penalty_kind);
    check_poisson_kind(model, kind)?;

    let method = match (&args.method, &args.taus) {
        (Some(method), None) => Some(*method),
        (None, Some(_)) => None,
        (Some(_), Some(_)) => {
            return Err(ShiftscanError::invalid_parameter(
                "--method and --taus are mutually exclusive",
            ));
        }
        (None, None) => {
            return Err(ShiftscanError::invalid_parameter(
                "adjust needs a changepoint source: --method or --taus",
            ));
        }
    };
    if let Some(m) = method {
        if args.seed.is_some() && !matches!(m, MethodArg::Wbs | MethodArg::Ga) {
            return Err(foreign_flag("--seed", m.name()));
        }
        if args.max_n.is_some() && m != MethodArg::Exhaustive {
            return Err(foreign_flag("--max-n", m.name()));
        }
        if args.penalty.is_some() && !m.is_model_based() {
            return Err(foreign_flag("--penalty", m.name()));
        }
    } else {
        if args.seed.is_some() {
            return Err(ShiftscanError::invalid_parameter(
                "--seed does not apply when --taus is given",
            ));
        }
        if args.max_n.is_some() {
            return Err(ShiftscanError::invalid_parameter(
                "--max-n does not apply when --taus is given",
            ));
        }
        if args.penalty.is_some() {
            return Err(ShiftscanError::invalid_parameter(
                "--penalty does not apply when --taus is given",
            ));
        }
    }

    let series = ingest::read_series_csv(&args.input, kind)?;
    let n = series.len();
    let seed = args.seed.unwrap_or(0);

    let (source, config) = match method {
        None => {
            let taus = parse_usize_list(args.taus.as_deref().unwrap_or(""), "--taus")?;
            let config = ChangepointConfiguration::new(taus)?;
            config.validate_for(n)?;
            ("manual".to_string(), config)
        }
        Some(m) => {
            let (_, _, input_degenerate) = cusum::null_moments(series.values());
            let config = if input_degenerate {
                // A constant series has nothing to adjust; fall through to
                // the unchanged-clone path rather than erroring.
                ChangepointConfiguration::empty()
            } else {
                match m {
                    MethodArg::Amoc => {
                        let level = ConfidenceLevel::from_level(DEFAULT_LEVEL)?;
                        let outcome = cusum::amoc_test(&series, level)?;
                        let taus = if outcome.reject {
                            vec![outcome.tau_hat]
                        } else {
                            Vec::new()
                        };
                        ChangepointConfiguration::new(taus)?
                    }
                    MethodArg::Binseg => {
                        let level = ConfidenceLevel::from_level(DEFAULT_LEVEL)?;
                        segmentation::binary_segmentation(&series, level, DEFAULT_MIN_LEN)?.config
                    }
                    MethodArg::Wbs => {
                        let settings = WbsSettings {
                            seed,
                            ..WbsSettings::default()
                        };
                        segmentation::wild_binary_segmentation(&series, &settings)?.config
                    }
                    MethodArg::Exhaustive => {
                        search::exhaustive_search(&series, model, penalty_kind, args.max_n)?
                            .best_config
                    }
                    MethodArg::Ga => {
                        let settings = GaSettings {
                            seed,
                            ..GaSettings::default()
                        };
                        search::genetic_search(&series, model, penalty_kind, &settings)?.best_config
                    }
                }
            };
            (m.name().to_string(), config)
        }
    };

    let fit = models::fit(&series, &config, model)?;
    let anchor = args.anchor.to_anchor();
    let adjusted = homogenize::adjust(&series, &fit, anchor)?;

    let anchor_delta = match anchor {
        Anchor::FirstRegime => fit.deltas[0],
        Anchor::LastRegime => fit.deltas[fit.deltas.len() - 1],
    };
    let report = AdjustReport {
        schema_version: SCHEMA_VERSION,
        source,
        model: model.name().to_string(),
        anchor: anchor.name().to_string(),
        changepoint_indices: config.taus().to_vec(),
        regime_levels: fit.deltas.clone(),
        offsets: fit.deltas.iter().map(|d| d - anchor_delta).collect(),
        unchanged: config.is_empty(),
    };
    emit(&ingest::render_series_csv(&adjusted), args.out.as_deref())?;
    eprint!("{}", render_json(&report));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn foreign_flags_are_usage_errors() {
        let args = Cli::try_parse_from([
            "shiftscan", "detect", "--input", "x.csv", "--method", "amoc", "--threshold", "2.0",
        ])
        .expect("parses syntactically");
        let Command::Detect(detect) = args.command else {
            panic!("expected detect");
        };
        let err = check_detect_flags(&detect).expect_err("threshold is foreign to amoc");
        assert_eq!(exit_code_for(&err), 2);
        assert!(err.to_string().contains("--threshold"));
    }

    #[test]
    fn own_flags_pass_the_matrix() {
        let args = Cli::try_parse_from([
            "shiftscan", "detect", "--input", "x.csv", "--method", "wbs", "--threshold", "2.0",
            "--intervals", "100", "--seed", "7", "--min-len", "4",
        ])
        .expect("parses");
        let Command::Detect(detect) = args.command else {
            panic!("expected detect");
        };
        check_detect_flags(&detect).expect("all flags belong to wbs");
    }

    #[test]
    fn list_parsers_report_the_flag() {
        let err = parse_f64_list("0.9,oops", "--levels").expect_err("bad entry");
        assert!(err.to_string().contains("--levels"));
        assert_eq!(parse_usize_list("3, 8", "--taus").expect("parses"), vec![3, 8]);
        assert!(parse_f64_list("", "--levels").expect("empty ok").is_empty());
    }

    #[test]
    fn exit_codes_split_data_and_usage_errors() {
        assert_eq!(exit_code_for(&ShiftscanError::parse(3, "bad")), 1);
        assert_eq!(exit_code_for(&ShiftscanError::DegenerateSeries), 1);
        assert_eq!(exit_code_for(&ShiftscanError::UnsupportedLevel(0.5)), 2);
        assert_eq!(exit_code_for(&ShiftscanError::series_too_long(53, 24)), 2);
    }

    #[test]
    fn model_names_round_trip_through_clap() {
        for (text, expected) in [
            ("gauss-iid", SegmentModelKind::GaussIid),
            ("gauss-trend-ar1", SegmentModelKind::GaussTrendAr1),
            ("poisson", SegmentModelKind::Poisson),
        ] {
            let parsed = ModelArg::from_str(text, false).expect("known model name");
            assert_eq!(parsed.to_model_kind(), expected);
            assert_eq!(expected.name(), text);
        }
    }
}
