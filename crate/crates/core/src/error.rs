// SPDX-License-Identifier: MIT OR Apache-2.0

//! Error type shared by every module in the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, ShiftscanError>;

/// All the ways a shiftscan operation can fail.
#[derive(Debug, Error)]
pub enum ShiftscanError {
    /// The input series itself is unusable (too short, non-finite values,
    /// non-increasing time labels, ...).
    #[error("invalid series: {0}")]
    InvalidSeries(String),

    /// A changepoint configuration is malformed or incompatible with the
    /// series it is applied to.
    #[error("invalid changepoint configuration: {0}")]
    InvalidConfiguration(String),

    /// The sample variance of the series is (numerically) zero, so the CUSUM
    /// statistic is undefined.
    #[error("degenerate series: sample variance is zero, the CUSUM statistic is undefined")]
    DegenerateSeries,

    /// Count data contained something that is not a nonnegative integer.
    #[error("invalid count data: {0}")]
    InvalidCount(String),

    /// A confidence level without an embedded critical value was requested.
    #[error("unsupported confidence level {0}; supported levels are 0.90, 0.95, 0.975, 0.99")]
    UnsupportedLevel(f64),

    /// The normal equations for a segment-model fit are singular.
    #[error("singular fit: {0}")]
    SingularFit(String),

    /// Two series do not overlap enough to form a difference series.
    #[error("insufficient overlap: target and reference share {found} time point(s), need at least 2")]
    InsufficientOverlap {
        /// How many time labels the two series actually share.
        found: usize,
    },

    /// A parameter is outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Exhaustive search was asked to enumerate more configurations than the
    /// configured cap allows.
    #[error(
        "series length {n} exceeds the exhaustive-search cap of {max_n}: \
         exhaustive search fits 2^(N-1) = {fits} models here; \
         raise the cap explicitly or use the genetic search instead"
    )]
    SeriesTooLong {
        /// Length of the offending series.
        n: usize,
        /// The cap that was in effect.
        max_n: usize,
        /// Human-readable count of the model fits enumeration would need.
        fits: String,
    },

    /// A CSV line could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse {
        /// 1-based line number in the input file.
        line: usize,
        /// What went wrong on that line.
        message: String,
    },

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ShiftscanError {
    /// Shorthand for an [`ShiftscanError::InvalidSeries`] with a formatted message.
    pub fn invalid_series(msg: impl Into<String>) -> Self {
        Self::InvalidSeries(msg.into())
    }

    /// Shorthand for an [`ShiftscanError::InvalidConfiguration`].
    pub fn invalid_configuration(msg: impl Into<String>) -> Self {
        Self::InvalidConfiguration(msg.into())
    }

    /// Shorthand for an [`ShiftscanError::InvalidParameter`].
    pub fn invalid_parameter(msg: impl Into<String>) -> Self {
        Self::InvalidParameter(msg.into())
    }

    /// Shorthand for a [`ShiftscanError::Parse`] error at a 1-based line number.
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Self::Parse {
            line,
            message: message.into(),
        }
    }

    /// Builds the refusal error for an over-long exhaustive search, spelling
    /// out the 2^(N-1) model count when it fits in 128 bits.
    pub fn series_too_long(n: usize, max_n: usize) -> Self {
        let fits = if n >= 1 && n <= 128 {
            (1u128 << (n - 1)).to_string()
        } else {
            format!("2^{}", n.saturating_sub(1))
        };
        Self::SeriesTooLong { n, max_n, fits }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_too_long_spells_out_the_model_count() {
        let err = ShiftscanError::series_too_long(25, 24);
        let msg = err.to_string();
        assert!(msg.contains("2^(N-1)"), "message should cite the cost: {msg}");
        assert!(msg.contains("16777216"), "2^24 should be spelled out: {msg}");
        assert!(msg.contains("cap of 24"), "cap should be named: {msg}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = ShiftscanError::parse(7, "expected two fields");
        assert_eq!(err.to_string(), "parse error at line 7: expected two fields");
    }
}
