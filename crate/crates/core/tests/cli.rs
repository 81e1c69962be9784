// SPDX-License-Identifier: MIT OR Apache-2.0

//! End-to-end tests that drive the `shiftscan` binary as a subprocess:
//! exit codes, report schemas, CSV emission, and the documented error
//! surfaces for bad input and misused flags.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use shiftscan::report::DetectReport;

/// Runs the binary with `args`, returning the raw process output.
fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftscan"))
        .args(args)
        .output()
        .expect("the shiftscan binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

fn json_of(text: &str) -> Value {
    serde_json::from_str(text).expect("output parses as JSON")
}

/// Writes a `time,value` CSV with times 1..=n into `dir` and returns its path.
fn write_series(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let mut text = String::from("time,value\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{},{v}\n", i + 1));
    }
    let path = dir.join(name);
    std::fs::write(&path, text).expect("fixture CSV writes");
    path
}

/// Parses the value column of a `time,value` CSV (skipping the header).
fn csv_values(text: &str) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|line| {
            line.split(',')
                .nth(1)
                .expect("two fields per row")
                .parse::<f64>()
                .expect("value parses")
        })
        .collect()
}

#[test]
fn amoc_on_a_small_step_reports_no_rejection() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 1.0, 5.0, 5.0, 5.0]);
    let out = run(&["detect", "--input", input.to_str().unwrap(), "--method", "amoc"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let report = json_of(&stdout_of(&out));
    assert_eq!(report["method"], "amoc");
    assert_eq!(report["n"], 6);
    assert_eq!(report["reject"], false);
    assert_eq!(report["critical_value"], 1.358);
    // max |CUSUM| = 6 / sqrt(28.8) for this series.
    let want = 6.0 / 28.8_f64.sqrt();
    let got = report["max_abs"].as_f64().expect("max_abs is a number");
    assert!((got - want).abs() < 1e-9, "max_abs {got} vs {want}");
    assert_eq!(report["num_changepoints"], 0);
    assert_eq!(report["changepoint_indices"].as_array().unwrap().len(), 0);
}

#[test]
fn exhaustive_refuses_a_series_over_the_cap() {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut values = vec![5.0; 26];
    values.extend(vec![10.0; 27]);
    let input = write_series(dir.path(), "counts.csv", &values);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "exhaustive",
        "--model", "poisson", "--kind", "count",
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    // N = 53 means 2^52 model fits; the refusal spells the number out.
    assert!(err.contains("4503599627370496"), "stderr: {err}");
    assert!(err.contains("genetic"), "stderr: {err}");
}

#[test]
fn ga_finds_the_rate_shift_the_cap_blocked() {
    let dir = tempfile::tempdir().expect("tempdir");
    let mut values = vec![5.0; 26];
    values.extend(vec![10.0; 27]);
    let input = write_series(dir.path(), "counts.csv", &values);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "ga",
        "--model", "poisson", "--kind", "count",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let report = json_of(&stdout_of(&out));
    assert_eq!(report["method"], "ga");
    assert_eq!(report["model"], "poisson");
    assert_eq!(report["changepoint_indices"], serde_json::json!([26]));
    let levels = report["regime_levels"].as_array().expect("levels present");
    assert!((levels[0].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!((levels[1].as_f64().unwrap() - 10.0).abs() < 1e-12);
}

#[test]
fn constant_input_reports_a_warning_instead_of_failing() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "flat.csv", &[7.0; 12]);
    let out = run(&["detect", "--input", input.to_str().unwrap(), "--method", "binseg"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let report = json_of(&stdout_of(&out));
    assert_eq!(report["num_changepoints"], 0);
    let warning = report["warning"].as_str().expect("warning is set");
    assert!(warning.contains("constant"), "warning: {warning}");
}

#[test]
fn ragged_rows_are_data_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("ragged.csv");
    std::fs::write(&path, "1,1.0\n2\n").expect("fixture writes");
    let out = run(&["detect", "--input", path.to_str().unwrap(), "--method", "amoc"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr_of(&out).contains("line 2"), "stderr: {}", stderr_of(&out));
}

#[test]
fn non_monotone_times_are_data_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("dup.csv");
    std::fs::write(&path, "1,1.0\n1,2.0\n3,3.0\n").expect("fixture writes");
    let out = run(&["detect", "--input", path.to_str().unwrap(), "--method", "amoc"]);
    assert_eq!(exit_code(&out), 1);
    let err = stderr_of(&out);
    assert!(err.contains("line 2"), "stderr: {err}");
    assert!(err.contains("does not increase"), "stderr: {err}");
}

#[test]
fn fractional_counts_are_data_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "frac.csv", &[2.5, 3.0, 4.0, 5.0]);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "amoc",
        "--kind", "count",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("count"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn poisson_model_requires_count_ingestion() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "counts.csv", &[5.0, 6.0, 5.0, 7.0, 12.0, 11.0]);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "ga",
        "--model", "poisson",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("--kind count"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn foreign_flags_are_usage_errors() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "any.csv", &[1.0, 2.0, 3.0, 4.0]);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "exhaustive",
        "--level", "0.95",
    ]);
    assert_eq!(exit_code(&out), 2);
    let err = stderr_of(&out);
    assert!(err.contains("--level") && err.contains("does not apply"), "stderr: {err}");
}

#[test]
fn simulate_rejects_an_autocorrelation_outside_the_bound() {
    let out = run(&[
        "simulate", "--model", "gauss-trend-ar1", "--n", "30", "--deltas", "0",
        "--beta", "0.01", "--phi", "0.99999",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("0.999"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn simulate_poisson_emits_csv_and_a_report() {
    let out = run(&[
        "simulate", "--model", "poisson", "--n", "53", "--taus", "26",
        "--rates", "5,10", "--seed", "1",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let stdout = stdout_of(&out);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "time,value");
    assert_eq!(lines.len(), 54, "header plus one row per observation");
    for v in csv_values(&stdout) {
        assert!(v >= 0.0 && v.fract() == 0.0, "Poisson draw {v} is a count");
    }

    let report = json_of(&stderr_of(&out));
    assert_eq!(report["model"], "poisson");
    assert_eq!(report["n"], 53);
    assert_eq!(report["taus"], serde_json::json!([26]));
    assert_eq!(report["levels"], serde_json::json!([5.0, 10.0]));
    assert!(report["sigma"].is_null(), "no noise scale for Poisson");
}

#[test]
fn noiseless_simulation_round_trips_through_detect() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sim_path = dir.path().join("sim.csv");
    let out = run(&[
        "simulate", "--model", "gauss-iid", "--n", "16", "--taus", "5,11",
        "--deltas", "0,4,1", "--sigma", "0", "--seed", "3",
        "--out", sim_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let out = run(&[
        "detect", "--input", sim_path.to_str().unwrap(), "--method", "exhaustive",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let report = json_of(&stdout_of(&out));
    assert_eq!(report["changepoint_indices"], serde_json::json!([5, 11]));
    let levels = report["regime_levels"].as_array().expect("levels present");
    let want = [0.0, 4.0, 1.0];
    for (level, want) in levels.iter().zip(want) {
        assert!((level.as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn reports_round_trip_through_json() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 1.0, 5.0, 5.0, 5.0]);
    let out = run(&["detect", "--input", input.to_str().unwrap(), "--method", "amoc"]);
    assert_eq!(exit_code(&out), 0);

    let original = stdout_of(&out);
    let report: DetectReport = serde_json::from_str(&original).expect("deserializes");
    let mut reserialized =
        serde_json::to_string_pretty(&report).expect("reserializes");
    reserialized.push('\n');
    assert_eq!(original, reserialized, "JSON survives a round trip byte for byte");
}

#[test]
fn fitted_output_matches_levels_plus_trend() {
    let dir = tempfile::tempdir().expect("tempdir");
    let sim_path = dir.path().join("trend.csv");
    let out = run(&[
        "simulate", "--model", "gauss-trend-ar1", "--n", "12", "--taus", "6",
        "--deltas", "0,3", "--beta", "0.1", "--phi", "0", "--sigma", "0",
        "--seed", "2", "--out", sim_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let fitted_path = dir.path().join("fitted.csv");
    let out = run(&[
        "detect", "--input", sim_path.to_str().unwrap(), "--method", "exhaustive",
        "--model", "gauss-trend-ar1", "--fitted-out", fitted_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let report = json_of(&stdout_of(&out));
    assert_eq!(report["changepoint_indices"], serde_json::json!([6]));

    let beta = report["beta"].as_f64().expect("beta is fitted");
    let levels: Vec<f64> = report["regime_levels"]
        .as_array()
        .expect("levels present")
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let taus: Vec<usize> = report["changepoint_indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();

    // Every fitted value is its regime level plus the shared trend at that
    // 1-based position.
    let fitted_text = std::fs::read_to_string(&fitted_path).expect("fitted file exists");
    let mut lines = fitted_text.lines();
    assert_eq!(lines.next(), Some("time,observed,fitted"));
    for (i, line) in lines.enumerate() {
        let position = i + 1;
        let fitted: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        let regime = taus.iter().filter(|&&t| t < position).count();
        let want = levels[regime] + beta * position as f64;
        assert!(
            (fitted - want).abs() < 1e-10,
            "row {position}: fitted {fitted} vs level+trend {want}"
        );
    }
}

#[test]
fn csv_format_flattens_the_report() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 1.0, 5.0, 5.0, 5.0]);
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "amoc",
        "--format", "csv",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout_of(&out);
    assert!(text.contains("method,amoc"), "csv: {text}");
    assert!(text.contains("key,value"), "csv: {text}");
}

#[test]
fn detect_out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 1.0, 5.0, 5.0, 5.0]);
    let report_path = dir.path().join("report.json");
    let out = run(&[
        "detect", "--input", input.to_str().unwrap(), "--method", "amoc",
        "--out", report_path.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).is_empty(), "report went to the file, not stdout");
    let report = json_of(&std::fs::read_to_string(&report_path).expect("file exists"));
    assert_eq!(report["method"], "amoc");
}

#[test]
fn adjust_with_manual_taus_levels_the_series() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 5.0, 5.0]);
    let out = run(&[
        "adjust", "--input", input.to_str().unwrap(), "--taus", "2",
        "--anchor", "last",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let values = csv_values(&stdout_of(&out));
    assert_eq!(values, vec![5.0, 5.0, 5.0, 5.0]);

    let report = json_of(&stderr_of(&out));
    assert_eq!(report["source"], "manual");
    assert_eq!(report["anchor"], "last-regime");
    // `unchanged` is only emitted when the series was returned as-is.
    assert!(report["unchanged"].is_null());
    assert_eq!(report["offsets"], serde_json::json!([-4.0, 0.0]));
}

#[test]
fn adjust_rejects_contradictory_changepoint_sources() {
    let dir = tempfile::tempdir().expect("tempdir");
    let input = write_series(dir.path(), "step.csv", &[1.0, 1.0, 5.0, 5.0]);
    let out = run(&[
        "adjust", "--input", input.to_str().unwrap(), "--taus", "2",
        "--method", "amoc",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("mutually exclusive"),
        "stderr: {}",
        stderr_of(&out)
    );

    let out = run(&[
        "adjust", "--input", input.to_str().unwrap(), "--taus", "2",
        "--seed", "5",
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr_of(&out).contains("does not apply"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn adjusting_detected_shifts_leaves_nothing_to_find() {
    let dir = tempfile::tempdir().expect("tempdir");
    let raw = dir.path().join("raw.csv");
    let out = run(&[
        "simulate", "--model", "gauss-iid", "--n", "100", "--taus", "50",
        "--deltas", "0,10", "--sigma", "1", "--seed", "1",
        "--out", raw.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let adjusted = dir.path().join("adjusted.csv");
    let out = run(&[
        "adjust", "--input", raw.to_str().unwrap(), "--method", "binseg",
        "--out", adjusted.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let report = json_of(&stderr_of(&out));
    assert_eq!(report["source"], "binseg");
    assert_eq!(report["changepoint_indices"], serde_json::json!([50]));

    // The shift is gone: re-running the same detector on the adjusted series
    // comes back empty.
    let out = run(&[
        "detect", "--input", adjusted.to_str().unwrap(), "--method", "binseg",
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    let report = json_of(&stdout_of(&out));
    assert_eq!(report["num_changepoints"], 0);
}

#[test]
fn diff_aligns_on_the_shared_window() {
    let dir = tempfile::tempdir().expect("tempdir");
    let target = dir.path().join("target.csv");
    std::fs::write(&target, "1,1\n2,2\n3,3\n4,4\n5,5\n6,6\n").expect("fixture writes");
    let reference = dir.path().join("reference.csv");
    std::fs::write(&reference, "4,1\n5,1\n6,1\n7,1\n8,1\n9,1\n").expect("fixture writes");

    let out = run(&[
        "diff", "--target", target.to_str().unwrap(),
        "--reference", reference.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));
    assert_eq!(csv_values(&stdout_of(&out)), vec![3.0, 4.0, 5.0]);

    let report = json_of(&stderr_of(&out));
    assert_eq!(report["overlap"], 3);
    assert_eq!(report["first_time"], 4);
    assert_eq!(report["last_time"], 6);
    assert_eq!(report["target"], "target");
    assert_eq!(report["reference"], "reference");
}

#[test]
fn diff_requires_enough_overlap() {
    let dir = tempfile::tempdir().expect("tempdir");
    let target = dir.path().join("target.csv");
    std::fs::write(&target, "1,1\n2,2\n3,3\n").expect("fixture writes");
    let reference = dir.path().join("reference.csv");
    std::fs::write(&reference, "3,1\n4,1\n5,1\n").expect("fixture writes");

    let out = run(&[
        "diff", "--target", target.to_str().unwrap(),
        "--reference", reference.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(
        stderr_of(&out).contains("insufficient overlap"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn bare_invocation_is_a_usage_error() {
    let out = run(&[]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn help_and_version_exit_cleanly() {
    let out = run(&["--help"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("Usage"));

    let out = run(&["--version"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout_of(&out).contains("shiftscan"));
}

#[test]
fn critvals_smoke_run_is_fast_and_ordered() {
    let out = run(&["critvals", "--n", "200", "--reps", "100", "--seed", "1"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr_of(&out));

    let report = json_of(&stdout_of(&out));
    let rows = report["rows"].as_array().expect("rows present");
    assert_eq!(rows.len(), 4, "one row per default level");
    let simulated: Vec<f64> = rows
        .iter()
        .map(|r| r["simulated"].as_f64().expect("simulated value"))
        .collect();
    for pair in simulated.windows(2) {
        assert!(pair[0] <= pair[1], "quantiles rise with the level: {simulated:?}");
    }
    for row in rows {
        let asymptotic = row["asymptotic"].as_f64().expect("tabulated value");
        let difference = row["difference"].as_f64().expect("difference");
        let simulated = row["simulated"].as_f64().unwrap();
        assert!((difference - (simulated - asymptotic)).abs() < 1e-12);
    }
    let runtime = report["runtime_seconds"].as_f64().expect("runtime recorded");
    assert!(runtime < 1.0, "a 100-rep smoke run stays under a second, got {runtime}");
}
