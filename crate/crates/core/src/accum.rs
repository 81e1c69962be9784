// SPDX-License-Identifier: MIT OR Apache-2.0

//! Compensated (Kahan) summation helpers.
//!
//! Long prefix-sum chains are the numerical backbone of both the CUSUM
//! statistic and the segment-model likelihoods, so every running sum in the
//! crate goes through [`CompensatedSum`] rather than a bare `+=`.

/// Kahan–Babuška compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Adds one term, folding the rounding error into the compensation word.
    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// The compensated total.
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Compensated sum of an entire slice.
pub(crate) fn sum(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.value()
}

/// Compensated prefix sums: `prefix[k]` is the sum of the first `k` values,
/// so `prefix[0] == 0.0` and `prefix.len() == values.len() + 1`. Segment sums
/// over the 1-based inclusive range `(a..=b)` are then `prefix[b] - prefix[a - 1]`.
pub(crate) fn prefix_sums(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut acc = CompensatedSum::new();
    for &v in values {
        acc.add(v);
        out.push(acc.value());
    }
    out
}
