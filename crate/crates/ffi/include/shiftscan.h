/* SPDX-License-Identifier: MIT OR Apache-2.0 */

#ifndef SHIFTSCAN_H
#define SHIFTSCAN_H

/* Generated by cbindgen from the shiftscan-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible FFI call.
typedef enum {
  // The call succeeded.
  SHIFTSCAN_STATUS_OK = 0,
  // A required pointer argument was NULL.
  SHIFTSCAN_STATUS_NULL_POINTER = 1,
  // An argument was outside its documented domain (unknown model code,
  // unsupported confidence level, series longer than a search cap, ...).
  SHIFTSCAN_STATUS_INVALID_ARGUMENT = 2,
  // The data could not be processed (malformed series, degenerate
  // variance, singular fit, ...).
  SHIFTSCAN_STATUS_DATA_ERROR = 3,
  // An internal invariant failed; the library state is still sound but
  // the call produced nothing.
  SHIFTSCAN_STATUS_PANIC = 4,
} ShiftscanStatus;

// Segment model codes accepted by the search functions.
typedef enum {
  // Per-regime means with i.i.d. Gaussian noise.
  SHIFTSCAN_MODEL_GAUSS_IID = 0,
  // Per-regime levels plus a shared linear trend with AR(1) noise.
  SHIFTSCAN_MODEL_GAUSS_TREND_AR1 = 1,
  // Per-regime Poisson rates for count data.
  SHIFTSCAN_MODEL_POISSON = 2,
} ShiftscanModel;

// Penalty codes accepted by the search functions.
typedef enum {
  // Bayesian information criterion.
  SHIFTSCAN_PENALTY_BIC = 0,
  // Akaike information criterion.
  SHIFTSCAN_PENALTY_AIC = 1,
} ShiftscanPenalty;

// Opaque handle to a detection result.
typedef struct ShiftscanDetection ShiftscanDetection;

// Opaque handle to an immutable time series.
typedef struct ShiftscanSeries ShiftscanSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns a NUL-terminated description of the most recent error on the
// calling thread, or an empty string when no call has failed yet.
//
// The pointer stays valid until the next failing shiftscan call on the
// same thread; copy the string if it must outlive that.
const char *shiftscan_last_error_message(void);

// Creates a series from `len` observations.
//
// `values[i]` is observed at time label `times[i]`; `times` may be NULL,
// which labels the observations `1..=len`. Time labels must be strictly
// increasing and values finite. With `counts` true, values must also be
// nonnegative integers. On success writes a handle to `out`; release it
// with [`shiftscan_series_free`].
//
// # Safety
// `values` must point to `len` readable doubles, `times` to `len` readable
// 64-bit integers (or be NULL), and `out` to a writable pointer slot.
ShiftscanStatus shiftscan_series_new(const double *values,
                                     const int64_t *times,
                                     size_t len,
                                     bool counts,
                                     ShiftscanSeries **out);

// Releases a series handle. NULL is ignored.
//
// # Safety
// `series` must be NULL or a pointer returned by [`shiftscan_series_new`]
// that has not been freed yet.
void shiftscan_series_free(ShiftscanSeries *series);

// Returns the number of observations, or 0 for a NULL handle.
//
// # Safety
// `series` must be NULL or a live series handle.
size_t shiftscan_series_len(const ShiftscanSeries *series);

// Returns the asymptotic critical value for a supported confidence level
// (0.90, 0.95, 0.975, 0.99) through `out`.
//
// # Safety
// `out` must point to a writable double.
ShiftscanStatus shiftscan_critical_value(double level, double *out);

// Runs the CUSUM test for at most one changepoint at the given confidence
// level (0.90, 0.95, 0.975, or 0.99).
//
// The resulting detection holds one changepoint when the test rejects and
// none otherwise; [`shiftscan_detection_reject`] and
// [`shiftscan_detection_max_abs`] expose the test itself. Release the
// result with [`shiftscan_detection_free`].
//
// # Safety
// `series` must be a live series handle and `out` a writable pointer slot.
ShiftscanStatus shiftscan_amoc(const ShiftscanSeries *series,
                               double level,
                               ShiftscanDetection **out);

// Runs binary segmentation with the CUSUM test at the given confidence
// level and minimum segment length.
//
// # Safety
// `series` must be a live series handle and `out` a writable pointer slot.
ShiftscanStatus shiftscan_binseg(const ShiftscanSeries *series,
                                 double level,
                                 size_t min_len,
                                 ShiftscanDetection **out);

// Runs wild binary segmentation with `num_intervals` random intervals,
// the given flagging threshold on max |CUSUM|, minimum segment length,
// and RNG seed.
//
// # Safety
// `series` must be a live series handle and `out` a writable pointer slot.
ShiftscanStatus shiftscan_wbs(const ShiftscanSeries *series,
                              double threshold,
                              size_t num_intervals,
                              size_t min_len,
                              uint64_t seed,
                              ShiftscanDetection **out);

// Scores every changepoint configuration under the given segment model
// (a [`ShiftscanModel`] code) and penalty (a [`ShiftscanPenalty`] code)
// and returns the penalized-likelihood optimum.
//
// `max_n` of 0 keeps the built-in series-length cap; a positive value
// overrides it. [`shiftscan_detection_total`] exposes the winning score.
//
// # Safety
// `series` must be a live series handle and `out` a writable pointer slot.
ShiftscanStatus shiftscan_exhaustive(const ShiftscanSeries *series,
                                     uint32_t model,
                                     uint32_t penalty,
                                     size_t max_n,
                                     ShiftscanDetection **out);

// Runs the genetic configuration search under the given segment model and
// penalty codes with default tuning and the given seed.
//
// # Safety
// `series` must be a live series handle and `out` a writable pointer slot.
ShiftscanStatus shiftscan_ga(const ShiftscanSeries *series,
                             uint32_t model,
                             uint32_t penalty,
                             uint64_t seed,
                             ShiftscanDetection **out);

// Returns the number of detected changepoints, or 0 for a NULL handle.
//
// # Safety
// `detection` must be NULL or a live detection handle.
size_t shiftscan_detection_num_changepoints(const ShiftscanDetection *detection);

// Returns the `index`-th detected changepoint (0-based position in the
// ascending list; the value itself is a 1-based series index), or 0 when
// the handle is NULL or the position is out of range.
//
// # Safety
// `detection` must be NULL or a live detection handle.
size_t shiftscan_detection_changepoint_at(const ShiftscanDetection *detection, size_t index);

// Returns whether the producing call flagged any changepoint (for the
// single-changepoint test: whether the null was rejected). False for NULL.
//
// # Safety
// `detection` must be NULL or a live detection handle.
bool shiftscan_detection_reject(const ShiftscanDetection *detection);

// Returns the observed max |CUSUM| for a single-changepoint test result,
// or NaN when the producing call was not `shiftscan_amoc` or the handle is
// NULL.
//
// # Safety
// `detection` must be NULL or a live detection handle.
double shiftscan_detection_max_abs(const ShiftscanDetection *detection);

// Returns the penalized total of the winning configuration for a search
// result, or NaN when the producing call was not a search or the handle is
// NULL.
//
// # Safety
// `detection` must be NULL or a live detection handle.
double shiftscan_detection_total(const ShiftscanDetection *detection);

// Releases a detection handle. NULL is ignored.
//
// # Safety
// `detection` must be NULL or a pointer returned by a shiftscan detection
// call that has not been freed yet.
void shiftscan_detection_free(ShiftscanDetection *detection);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHIFTSCAN_H */
