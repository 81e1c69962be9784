// SPDX-License-Identifier: MIT OR Apache-2.0

//! C ABI for the shiftscan changepoint-detection library.
//!
//! The surface follows the usual handle-and-status-code conventions: every
//! fallible call returns a [`ShiftscanStatus`] and writes its result through
//! an out-pointer; handles are opaque and must be released with the matching
//! `_free` function; [`shiftscan_last_error_message`] returns a
//! thread-local, NUL-terminated description of the most recent failure on
//! the calling thread.
//!
//! Detected changepoints are 1-based indices, each the last index of its
//! regime, matching the Rust API and the command line reports.

#![warn(missing_docs)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use shiftscan::cusum::{self, ConfidenceLevel};
use shiftscan::models::{PenaltyKind, SegmentModelKind};
use shiftscan::search::{self, GaSettings};
use shiftscan::segmentation::{self, WbsSettings};
use shiftscan::{Series, SeriesKind, ShiftscanError};

/// Status code returned by every fallible FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftscanStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// An argument was outside its documented domain (unknown model code,
    /// unsupported confidence level, series longer than a search cap, ...).
    InvalidArgument = 2,
    /// The data could not be processed (malformed series, degenerate
    /// variance, singular fit, ...).
    DataError = 3,
    /// An internal invariant failed; the library state is still sound but
    /// the call produced nothing.
    Panic = 4,
}

/// Segment model codes accepted by the search functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftscanModel {
    /// Per-regime means with i.i.d. Gaussian noise.
    GaussIid = 0,
    /// Per-regime levels plus a shared linear trend with AR(1) noise.
    GaussTrendAr1 = 1,
    /// Per-regime Poisson rates for count data.
    Poisson = 2,
}

/// Penalty codes accepted by the search functions.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftscanPenalty {
    /// Bayesian information criterion.
    Bic = 0,
    /// Akaike information criterion.
    Aic = 1,
}

/// Opaque handle to an immutable time series.
pub struct ShiftscanSeries {
    inner: Series,
}

/// Opaque handle to a detection result.
pub struct ShiftscanDetection {
    taus: Vec<usize>,
    reject: bool,
    max_abs: f64,
    total: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() =
            CString::new(sanitized).expect("NUL bytes were just stripped from the message");
    });
}

fn fail(err: &ShiftscanError) -> ShiftscanStatus {
    set_last_error(&err.to_string());
    match err {
        ShiftscanError::InvalidParameter(_)
        | ShiftscanError::UnsupportedLevel(_)
        | ShiftscanError::SeriesTooLong { .. }
        | ShiftscanError::InvalidConfiguration(_) => ShiftscanStatus::InvalidArgument,
        _ => ShiftscanStatus::DataError,
    }
}

fn null_pointer(what: &str) -> ShiftscanStatus {
    set_last_error(&format!("{what} must not be NULL"));
    ShiftscanStatus::NullPointer
}

/// Runs `f`, converting panics into [`ShiftscanStatus::Panic`] so unwinding
/// never crosses the C boundary.
fn guarded(f: impl FnOnce() -> ShiftscanStatus) -> ShiftscanStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            ShiftscanStatus::Panic
        }
    }
}

fn decode_model(model: u32) -> Result<SegmentModelKind, ShiftscanStatus> {
    match model {
        0 => Ok(SegmentModelKind::GaussIid),
        1 => Ok(SegmentModelKind::GaussTrendAr1),
        2 => Ok(SegmentModelKind::Poisson),
        other => {
            set_last_error(&format!("unknown model code {other}"));
            Err(ShiftscanStatus::InvalidArgument)
        }
    }
}

fn decode_penalty(penalty: u32) -> Result<PenaltyKind, ShiftscanStatus> {
    match penalty {
        0 => Ok(PenaltyKind::Bic),
        1 => Ok(PenaltyKind::Aic),
        other => {
            set_last_error(&format!("unknown penalty code {other}"));
            Err(ShiftscanStatus::InvalidArgument)
        }
    }
}

fn decode_level(level: f64) -> Result<ConfidenceLevel, ShiftscanStatus> {
    ConfidenceLevel::from_level(level).map_err(|err| fail(&err))
}

unsafe fn write_detection(
    out: *mut *mut ShiftscanDetection,
    detection: ShiftscanDetection,
) -> ShiftscanStatus {
    *out = Box::into_raw(Box::new(detection));
    ShiftscanStatus::Ok
}

/// Returns a NUL-terminated description of the most recent error on the
/// calling thread, or an empty string when no call has failed yet.
///
/// The pointer stays valid until the next failing shiftscan call on the
/// same thread; copy the string if it must outlive that.
#[no_mangle]
pub extern "C" fn shiftscan_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Creates a series from `len` observations.
///
/// `values[i]` is observed at time label `times[i]`; `times` may be NULL,
/// which labels the observations `1..=len`. Time labels must be strictly
/// increasing and values finite. With `counts` true, values must also be
/// nonnegative integers. On success writes a handle to `out`; release it
/// with [`shiftscan_series_free`].
///
/// # Safety
/// `values` must point to `len` readable doubles, `times` to `len` readable
/// 64-bit integers (or be NULL), and `out` to a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_series_new(
    values: *const f64,
    times: *const i64,
    len: usize,
    counts: bool,
    out: *mut *mut ShiftscanSeries,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if values.is_null() {
        return null_pointer("values");
    }
    let values = std::slice::from_raw_parts(values, len).to_vec();
    let times = if times.is_null() {
        (1..=len as i64).collect()
    } else {
        std::slice::from_raw_parts(times, len).to_vec()
    };
    let kind = if counts {
        SeriesKind::Count
    } else {
        SeriesKind::Continuous
    };
    guarded(|| match Series::new(values, times, kind) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(ShiftscanSeries { inner }));
            ShiftscanStatus::Ok
        }
        Err(err) => fail(&err),
    })
}

/// Releases a series handle. NULL is ignored.
///
/// # Safety
/// `series` must be NULL or a pointer returned by [`shiftscan_series_new`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_series_free(series: *mut ShiftscanSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Returns the number of observations, or 0 for a NULL handle.
///
/// # Safety
/// `series` must be NULL or a live series handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_series_len(series: *const ShiftscanSeries) -> usize {
    if series.is_null() {
        return 0;
    }
    let series = &*series;
    series.inner.len()
}

/// Returns the asymptotic critical value for a supported confidence level
/// (0.90, 0.95, 0.975, 0.99) through `out`.
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_critical_value(level: f64, out: *mut f64) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    match decode_level(level) {
        Ok(l) => {
            *out = l.critical_value();
            ShiftscanStatus::Ok
        }
        Err(status) => status,
    }
}

/// Runs the CUSUM test for at most one changepoint at the given confidence
/// level (0.90, 0.95, 0.975, or 0.99).
///
/// The resulting detection holds one changepoint when the test rejects and
/// none otherwise; [`shiftscan_detection_reject`] and
/// [`shiftscan_detection_max_abs`] expose the test itself. Release the
/// result with [`shiftscan_detection_free`].
///
/// # Safety
/// `series` must be a live series handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_amoc(
    series: *const ShiftscanSeries,
    level: f64,
    out: *mut *mut ShiftscanDetection,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if series.is_null() {
        return null_pointer("series");
    }
    let series = &(*series).inner;
    guarded(|| {
        let level = match decode_level(level) {
            Ok(l) => l,
            Err(status) => return status,
        };
        match cusum::amoc_test(series, level) {
            Ok(outcome) => write_detection(
                out,
                ShiftscanDetection {
                    taus: if outcome.reject {
                        vec![outcome.tau_hat]
                    } else {
                        Vec::new()
                    },
                    reject: outcome.reject,
                    max_abs: outcome.max_abs,
                    total: f64::NAN,
                },
            ),
            Err(err) => fail(&err),
        }
    })
}

/// Runs binary segmentation with the CUSUM test at the given confidence
/// level and minimum segment length.
///
/// # Safety
/// `series` must be a live series handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_binseg(
    series: *const ShiftscanSeries,
    level: f64,
    min_len: usize,
    out: *mut *mut ShiftscanDetection,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if series.is_null() {
        return null_pointer("series");
    }
    let series = &(*series).inner;
    guarded(|| {
        let level = match decode_level(level) {
            Ok(l) => l,
            Err(status) => return status,
        };
        match segmentation::binary_segmentation(series, level, min_len) {
            Ok(result) => write_detection(
                out,
                ShiftscanDetection {
                    reject: !result.config.is_empty(),
                    taus: result.config.taus().to_vec(),
                    max_abs: f64::NAN,
                    total: f64::NAN,
                },
            ),
            Err(err) => fail(&err),
        }
    })
}

/// Runs wild binary segmentation with `num_intervals` random intervals,
/// the given flagging threshold on max |CUSUM|, minimum segment length,
/// and RNG seed.
///
/// # Safety
/// `series` must be a live series handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_wbs(
    series: *const ShiftscanSeries,
    threshold: f64,
    num_intervals: usize,
    min_len: usize,
    seed: u64,
    out: *mut *mut ShiftscanDetection,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if series.is_null() {
        return null_pointer("series");
    }
    let series = &(*series).inner;
    guarded(|| {
        let settings = WbsSettings {
            num_intervals,
            threshold,
            min_len,
            seed,
        };
        match segmentation::wild_binary_segmentation(series, &settings) {
            Ok(result) => write_detection(
                out,
                ShiftscanDetection {
                    reject: !result.config.is_empty(),
                    taus: result.config.taus().to_vec(),
                    max_abs: f64::NAN,
                    total: f64::NAN,
                },
            ),
            Err(err) => fail(&err),
        }
    })
}

/// Scores every changepoint configuration under the given segment model
/// (a [`ShiftscanModel`] code) and penalty (a [`ShiftscanPenalty`] code)
/// and returns the penalized-likelihood optimum.
///
/// `max_n` of 0 keeps the built-in series-length cap; a positive value
/// overrides it. [`shiftscan_detection_total`] exposes the winning score.
///
/// # Safety
/// `series` must be a live series handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_exhaustive(
    series: *const ShiftscanSeries,
    model: u32,
    penalty: u32,
    max_n: usize,
    out: *mut *mut ShiftscanDetection,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if series.is_null() {
        return null_pointer("series");
    }
    let series = &(*series).inner;
    guarded(|| {
        let (model, penalty) = match (decode_model(model), decode_penalty(penalty)) {
            (Ok(m), Ok(p)) => (m, p),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let cap = if max_n == 0 { None } else { Some(max_n) };
        match search::exhaustive_search(series, model, penalty, cap) {
            Ok(result) => write_detection(
                out,
                ShiftscanDetection {
                    reject: !result.best_config.is_empty(),
                    taus: result.best_config.taus().to_vec(),
                    max_abs: f64::NAN,
                    total: result.best_score.total,
                },
            ),
            Err(err) => fail(&err),
        }
    })
}

/// Runs the genetic configuration search under the given segment model and
/// penalty codes with default tuning and the given seed.
///
/// # Safety
/// `series` must be a live series handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_ga(
    series: *const ShiftscanSeries,
    model: u32,
    penalty: u32,
    seed: u64,
    out: *mut *mut ShiftscanDetection,
) -> ShiftscanStatus {
    if out.is_null() {
        return null_pointer("out");
    }
    if series.is_null() {
        return null_pointer("series");
    }
    let series = &(*series).inner;
    guarded(|| {
        let (model, penalty) = match (decode_model(model), decode_penalty(penalty)) {
            (Ok(m), Ok(p)) => (m, p),
            (Err(status), _) | (_, Err(status)) => return status,
        };
        let settings = GaSettings {
            seed,
            ..GaSettings::default()
        };
        match search::genetic_search(series, model, penalty, &settings) {
            Ok(result) => write_detection(
                out,
                ShiftscanDetection {
                    reject: !result.best_config.is_empty(),
                    taus: result.best_config.taus().to_vec(),
                    max_abs: f64::NAN,
                    total: result.best_score.total,
                },
            ),
            Err(err) => fail(&err),
        }
    })
}

/// Returns the number of detected changepoints, or 0 for a NULL handle.
///
/// # Safety
/// `detection` must be NULL or a live detection handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_num_changepoints(
    detection: *const ShiftscanDetection,
) -> usize {
    if detection.is_null() {
        return 0;
    }
    let detection = &*detection;
    detection.taus.len()
}

/// Returns the `index`-th detected changepoint (0-based position in the
/// ascending list; the value itself is a 1-based series index), or 0 when
/// the handle is NULL or the position is out of range.
///
/// # Safety
/// `detection` must be NULL or a live detection handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_changepoint_at(
    detection: *const ShiftscanDetection,
    index: usize,
) -> usize {
    if detection.is_null() {
        return 0;
    }
    let detection = &*detection;
    detection.taus.get(index).copied().unwrap_or(0)
}

/// Returns whether the producing call flagged any changepoint (for the
/// single-changepoint test: whether the null was rejected). False for NULL.
///
/// # Safety
/// `detection` must be NULL or a live detection handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_reject(
    detection: *const ShiftscanDetection,
) -> bool {
    if detection.is_null() {
        return false;
    }
    (*detection).reject
}

/// Returns the observed max |CUSUM| for a single-changepoint test result,
/// or NaN when the producing call was not `shiftscan_amoc` or the handle is
/// NULL.
///
/// # Safety
/// `detection` must be NULL or a live detection handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_max_abs(
    detection: *const ShiftscanDetection,
) -> f64 {
    if detection.is_null() {
        return f64::NAN;
    }
    (*detection).max_abs
}

/// Returns the penalized total of the winning configuration for a search
/// result, or NaN when the producing call was not a search or the handle is
/// NULL.
///
/// # Safety
/// `detection` must be NULL or a live detection handle.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_total(
    detection: *const ShiftscanDetection,
) -> f64 {
    if detection.is_null() {
        return f64::NAN;
    }
    (*detection).total
}

/// Releases a detection handle. NULL is ignored.
///
/// # Safety
/// `detection` must be NULL or a pointer returned by a shiftscan detection
/// call that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn shiftscan_detection_free(detection: *mut ShiftscanDetection) {
    if !detection.is_null() {
        drop(Box::from_raw(detection));
    }
}
