// SPDX-License-Identifier: MIT OR Apache-2.0

//! CSV ingestion and rendering.
//!
//! The on-disk format is two comma-separated columns, `time,value`, with an
//! optional header row. Times are integers (years, season indices) and must
//! be strictly increasing; values are finite numbers, and nonnegative
//! integers when the series is ingested as count data. Parse errors carry
//! 1-based line numbers.

use std::path::Path;

use crate::error::{Result, ShiftscanError};
use crate::types::{Series, SeriesKind};

/// Reads and parses a series from a CSV file.
pub fn read_series_csv(path: &Path, kind: SeriesKind) -> Result<Series> {
    let text = std::fs::read_to_string(path)?;
    parse_series_csv(&text, kind)
}

/// Parses a series from CSV text. The first row is treated as a header
/// when it does not parse as `integer,number`; blank lines are skipped.
pub fn parse_series_csv(text: &str, kind: SeriesKind) -> Result<Series> {
    let mut times: Vec<i64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    let mut saw_data_or_header = false;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(ShiftscanError::parse(
                line_no,
                format!("expected two comma-separated fields, found {}", fields.len()),
            ));
        }
        let parsed_time = fields[0].parse::<i64>();
        let parsed_value = fields[1].parse::<f64>();
        match (parsed_time, parsed_value) {
            (Ok(time), Ok(value)) => {
                if !value.is_finite() {
                    return Err(ShiftscanError::parse(
                        line_no,
                        format!("non-finite value {value}"),
                    ));
                }
                if let Some(&prev) = times.last() {
                    if time <= prev {
                        return Err(ShiftscanError::parse(
                            line_no,
                            format!("time {time} does not increase past {prev}"),
                        ));
                    }
                }
                times.push(time);
                values.push(value);
                saw_data_or_header = true;
            }
            _ if !saw_data_or_header => {
                // First non-blank row that does not parse: a header.
                saw_data_or_header = true;
            }
            (Err(_), _) => {
                return Err(ShiftscanError::parse(
                    line_no,
                    format!("cannot parse time label {:?} as an integer", fields[0]),
                ));
            }
            (_, Err(_)) => {
                return Err(ShiftscanError::parse(
                    line_no,
                    format!("cannot parse value {:?} as a number", fields[1]),
                ));
            }
        }
    }
    Series::new(values, times, kind)
}

/// Renders a series as `time,value` CSV with a header row.
pub fn render_series_csv(series: &Series) -> String {
    let mut out = String::from("time,value\n");
    for (&t, &v) in series.times().iter().zip(series.values()) {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// Renders observed values next to fitted means as
/// `time,observed,fitted` CSV.
///
/// # Panics
/// Panics if `fitted` is not exactly one value per observation.
pub fn render_fitted_csv(series: &Series, fitted: &[f64]) -> String {
    assert_eq!(
        series.len(),
        fitted.len(),
        "one fitted value per observation"
    );
    let mut out = String::from("time,observed,fitted\n");
    for ((&t, &v), &f) in series.times().iter().zip(series.values()).zip(fitted) {
        out.push_str(&format!("{t},{v},{f}\n"));
    }
    out
}
