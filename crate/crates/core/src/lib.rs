// SPDX-License-Identifier: MIT OR Apache-2.0

//! Mean-shift changepoint detection for time series.
//!
//! The crate detects abrupt shifts in the mean level of a series and
//! quantifies them under several segment models:
//!
//! * [`cusum`] — the scaled CUSUM statistic, the at-most-one-changepoint
//!   (AMOC) hypothesis test against Brownian-bridge critical values, and a
//!   Monte Carlo calibrator for those critical values.
//! * [`models`] — penalized-likelihood segment models (Gaussian i.i.d.,
//!   Gaussian with linear trend and AR(1) errors, Poisson counts) scored by
//!   BIC or AIC.
//! * [`segmentation`] — recursive binary segmentation and wild binary
//!   segmentation for multiple changepoints.
//! * [`search`] — exhaustive and genetic minimization of the penalized
//!   likelihood over changepoint configurations.
//! * [`homogenize`] — difference series between a target and a reference,
//!   and mean-shift adjustment of a series given fitted shifts.
//! * [`simulate`] — synthetic series generators with known ground truth.
//!
//! Observations are indexed `1..=N`; a changepoint at `tau` is the last
//! index of its regime, and index 1 is never a changepoint. See [`types`]
//! for the conventions shared by every module.
//!
//! The `SHIFTSCAN_THREADS` environment variable caps worker parallelism.
//! Results are independent of the thread count: every Monte Carlo replicate
//! owns its own RNG stream and parallel reductions are order-stable.

#![forbid(unsafe_code)]
#![warn(missing_docs)]

mod accum;
mod parallel;

pub mod cli;
pub mod cusum;
pub mod error;
pub mod homogenize;
pub mod ingest;
pub mod models;
pub mod report;
pub mod search;
pub mod segmentation;
pub mod simulate;
pub mod types;

pub use error::{Result, ShiftscanError};
pub use types::{ChangepointConfiguration, RegimePartition, Series, SeriesKind};

/// Environment variable that caps the number of worker threads.
pub use parallel::THREADS_ENV_VAR;
