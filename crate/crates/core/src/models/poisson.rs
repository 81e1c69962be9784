// SPDX-License-Identifier: MIT OR Apache-2.0

//! Poisson segment model: one event rate per regime.
//!
//! For counts `X_t` with rate `lambda_i` in regime `i`, the maximized
//! log-likelihood at `lambda_hat_i = mean of the regime` gives
//!
//! ```text
//! -2 ln L = -2 sum_t [ X_t ln lambda_hat - lambda_hat - ln Gamma(X_t + 1) ]
//! ```
//!
//! Per regime this collapses to `S ln(S / len) - S` with `S` the regime sum
//! (zero when `S = 0`, using the `0 ln 0 = 0` convention), plus a factorial
//! term that does not depend on the configuration and is precomputed once.

use statrs::function::gamma::ln_gamma;

use crate::accum::{prefix_sums, CompensatedSum};
use crate::error::{Result, ShiftscanError};
use crate::models::{SegmentFit, SegmentModelKind};
use crate::types::{partition, ChangepointConfiguration};

/// Whole-series precomputation for the Poisson model.
pub(crate) struct PoissonContext {
    n: usize,
    prefix: Vec<f64>,
    /// `sum_t ln Gamma(X_t + 1)`, shared by every configuration.
    ln_factorial_total: f64,
}

impl PoissonContext {
    pub(crate) fn new(values: &[f64]) -> Result<Self> {
        let mut ln_fact = CompensatedSum::new();
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0 && v.fract() == 0.0) {
                return Err(ShiftscanError::InvalidCount(format!(
                    "value {v} at position {} is not a nonnegative integer",
                    i + 1
                )));
            }
            ln_fact.add(ln_gamma(v + 1.0));
        }
        Ok(Self {
            n: values.len(),
            prefix: prefix_sums(values),
            ln_factorial_total: ln_fact.value(),
        })
    }

    /// `sum_seg [ S ln(S/len) - S ]` over the regimes.
    fn rate_term(&self, segments: &[(usize, usize)]) -> f64 {
        let mut acc = CompensatedSum::new();
        for &(start, end) in segments {
            let s = self.prefix[end] - self.prefix[start - 1];
            if s > 0.0 {
                let len = (end - start + 1) as f64;
                acc.add(s * (s / len).ln() - s);
            }
            // s == 0: every count in the regime is zero and the regime
            // contributes exactly zero log-likelihood (0 ln 0 = 0).
        }
        acc.value()
    }

    pub(crate) fn neg2loglik(&self, config: &ChangepointConfiguration) -> Result<f64> {
        let part = partition(config, self.n)?;
        Ok(-2.0 * (self.rate_term(part.segments()) - self.ln_factorial_total))
    }

    pub(crate) fn fit(&self, config: &ChangepointConfiguration) -> Result<SegmentFit> {
        let part = partition(config, self.n)?;
        let rates = part
            .segments()
            .iter()
            .map(|&(start, end)| {
                (self.prefix[end] - self.prefix[start - 1]) / (end - start + 1) as f64
            })
            .collect();
        Ok(SegmentFit {
            kind: SegmentModelKind::Poisson,
            config: config.clone(),
            deltas: rates,
            beta: None,
            phi: None,
            sigma2: None,
            neg2loglik: -2.0 * (self.rate_term(part.segments()) - self.ln_factorial_total),
            degenerate: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{penalty, PenaltyKind};
    use crate::types::enumerate_configurations;
    use proptest::prelude::*;

    fn config(taus: &[usize]) -> ChangepointConfiguration {
        ChangepointConfiguration::new(taus.to_vec()).expect("valid config")
    }

    /// Direct log-pmf sum, written independently of the prefix-sum path:
    /// exact integer factorials via a running log sum.
    fn oracle_neg2loglik(values: &[f64], taus: &[usize]) -> f64 {
        let n = values.len();
        let mut bounds = vec![0usize];
        bounds.extend(taus.iter().copied());
        bounds.push(n);
        let mut total = 0.0f64;
        for w in bounds.windows(2) {
            let seg = &values[w[0]..w[1]];
            let lambda: f64 = seg.iter().sum::<f64>() / seg.len() as f64;
            for &x in seg {
                let ln_x_factorial: f64 = (1..=(x as u64)).map(|k| (k as f64).ln()).sum();
                let ln_pmf = if lambda == 0.0 {
                    // All counts are zero here; pmf is 1.
                    0.0
                } else {
                    x * lambda.ln() - lambda - ln_x_factorial
                };
                total += -2.0 * ln_pmf;
            }
        }
        total
    }

    #[test]
    fn matches_direct_log_pmf_sum() {
        let values = [2.0, 2.0, 8.0, 8.0];
        let ctx = PoissonContext::new(&values).expect("valid counts");
        for taus in [vec![], vec![2], vec![3], vec![2, 3]] {
            let got = ctx.neg2loglik(&config(&taus)).expect("fits");
            let want = oracle_neg2loglik(&values, &taus);
            assert!(
                (got - want).abs() < 1e-10,
                "taus {taus:?}: got {got}, want {want}"
            );
        }
    }

    #[test]
    fn rates_are_regime_means() {
        let ctx = PoissonContext::new(&[2.0, 2.0, 8.0, 8.0]).expect("valid counts");
        let fit = ctx.fit(&config(&[2])).expect("fits");
        assert_eq!(fit.deltas, vec![2.0, 8.0]);
        assert!(fit.sigma2.is_none());
        assert!(!fit.degenerate);
    }

    #[test]
    fn all_zero_regime_contributes_zero_loglik() {
        let ctx = PoissonContext::new(&[0.0, 0.0, 3.0, 5.0]).expect("valid counts");
        let fit = ctx.fit(&config(&[2])).expect("fits");
        assert_eq!(fit.deltas[0], 0.0);
        assert!(fit.neg2loglik.is_finite());
        // The zero regime has pmf 1 everywhere, so only the second regime
        // contributes; check against the oracle.
        let want = oracle_neg2loglik(&[0.0, 0.0, 3.0, 5.0], &[2]);
        assert!((fit.neg2loglik - want).abs() < 1e-10);
    }

    #[test]
    fn rejects_non_count_data() {
        assert!(matches!(
            PoissonContext::new(&[1.0, 2.5, 3.0]),
            Err(ShiftscanError::InvalidCount(_))
        ));
        assert!(matches!(
            PoissonContext::new(&[1.0, -2.0]),
            Err(ShiftscanError::InvalidCount(_))
        ));
    }

    #[test]
    fn bic_picks_the_visible_rate_shift() {
        // Counts [2,2,8,8]: among all configurations, BIC must prefer the
        // single changepoint at index 2.
        let values = [2.0, 2.0, 8.0, 8.0];
        let ctx = PoissonContext::new(&values).expect("valid counts");
        let n = values.len();
        let mut best: Option<(f64, Vec<usize>)> = None;
        for cfg in enumerate_configurations(n) {
            let Ok(l) = ctx.neg2loglik(&cfg) else { continue };
            let total = l + penalty(PenaltyKind::Bic, cfg.num_changepoints(), n);
            if best.as_ref().is_none_or(|(b, _)| total < *b) {
                best = Some((total, cfg.taus().to_vec()));
            }
        }
        assert_eq!(best.expect("some config scored").1, vec![2]);
    }

    proptest! {
        /// Prefix-sum scoring agrees with the direct pmf sum on random counts.
        #[test]
        fn oracle_agreement_on_random_counts(
            values in proptest::collection::vec(0u8..30, 4..20),
            split in 2usize..18,
        ) {
            let values: Vec<f64> = values.iter().map(|&v| v as f64).collect();
            let n = values.len();
            let taus = if split < n { vec![split] } else { vec![] };
            let ctx = PoissonContext::new(&values).expect("valid counts");
            let got = ctx.neg2loglik(&config(&taus)).expect("fits");
            let want = oracle_neg2loglik(&values, &taus);
            prop_assert!((got - want).abs() < 1e-8, "got {}, want {}", got, want);
        }
    }
}
