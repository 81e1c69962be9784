// SPDX-License-Identifier: MIT OR Apache-2.0

//! Global minimization of the penalized likelihood over changepoint
//! configurations: exhaustive enumeration for short series, a genetic
//! algorithm for everything else.
//!
//! Exhaustive search scores all `2^(N-1)` configurations and is therefore
//! capped: past a few dozen observations the count explodes (already more
//! than a billion configurations at `N = 32`). The genetic search encodes a
//! configuration as an `N-1` bit chromosome (bit `j` toggles a changepoint
//! at `j + 2`) and evolves a population by tournament selection, uniform
//! crossover, bit-flip mutation, and elitism.
//!
//! Both searches break ties — identical totals — toward fewer changepoints,
//! then lexicographically smaller indices, so results are deterministic and
//! agree with each other on series where both run.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, ShiftscanError};
use crate::models::{penalty, Objective, PenaltyKind, PenalizedScore, SegmentModelKind};
use crate::parallel;
use crate::types::{enumerate_configurations, ChangepointConfiguration, Series};

/// Default length cap for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_MAX_N: usize = 24;

/// Tighter default cap when the segment model is trend + AR(1), whose fits
/// cost orders of magnitude more than the prefix-sum models.
pub const DEFAULT_TREND_AR1_EXHAUSTIVE_MAX_N: usize = 16;

/// The default exhaustive-search cap for a model kind.
pub fn default_exhaustive_cap(kind: SegmentModelKind) -> usize {
    match kind {
        SegmentModelKind::GaussTrendAr1 => DEFAULT_TREND_AR1_EXHAUSTIVE_MAX_N,
        _ => DEFAULT_EXHAUSTIVE_MAX_N,
    }
}

/// Outcome of a configuration search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// The best configuration found.
    pub best_config: ChangepointConfiguration,
    /// Its penalized score.
    pub best_score: PenalizedScore,
    /// Number of objective evaluations (model fits attempted, including
    /// infeasible configurations; cache hits in the genetic search are not
    /// re-counted).
    pub evaluations: u64,
    /// Genetic search only: the generation-best total per generation,
    /// nonincreasing thanks to elitism. Empty for exhaustive search.
    pub history: Vec<f64>,
}

/// Tuning knobs for the genetic search.
#[derive(Debug, Clone)]
pub struct GaSettings {
    /// Chromosomes per generation.
    pub population_size: usize,
    /// Hard cap on generations.
    pub max_generations: usize,
    /// Stop after this many generations without improvement of the best
    /// total.
    pub stagnation_limit: usize,
    /// Probability that a child is produced by uniform crossover rather
    /// than cloning one parent.
    pub crossover_rate: f64,
    /// Per-bit flip probability; `None` uses `1 / (N - 1)` (one expected
    /// flip per child).
    pub mutation_rate: Option<f64>,
    /// Chromosomes copied unchanged into the next generation.
    pub elitism: usize,
    /// RNG seed for the evolutionary run.
    pub seed: u64,
}

impl Default for GaSettings {
    fn default() -> Self {
        Self {
            population_size: 100,
            max_generations: 500,
            stagnation_limit: 50,
            crossover_rate: 0.9,
            mutation_rate: None,
            elitism: 2,
            seed: 0,
        }
    }
}

const TOURNAMENT_SIZE: usize = 2;

/// Scores every configuration and returns the penalized-likelihood optimum.
///
/// Refuses series longer than the cap (`max_n`, defaulting to
/// [`default_exhaustive_cap`]) because the configuration count is
/// `2^(N-1)`. Configurations the model cannot fit are skipped; they still
/// count toward `evaluations`.
pub fn exhaustive_search(
    series: &Series,
    kind: SegmentModelKind,
    penalty_kind: PenaltyKind,
    max_n: Option<usize>,
) -> Result<SearchResult> {
    let n = series.len();
    let cap = max_n.unwrap_or_else(|| default_exhaustive_cap(kind));
    if n > cap {
        return Err(ShiftscanError::series_too_long(n, cap));
    }
    let objective = Objective::new(series, kind)?;
    let penalties: Vec<f64> = (0..n).map(|m| penalty(penalty_kind, m, n)).collect();

    let mut evaluations = 0u64;
    let mut best: Option<(f64, ChangepointConfiguration)> = None;
    for config in enumerate_configurations(n) {
        evaluations += 1;
        let Ok(neg2) = objective.neg2loglik(&config) else {
            continue; // infeasible for this model; skip
        };
        let total = neg2 + penalties[config.num_changepoints()];
        let replace = match &best {
            None => true,
            Some((incumbent, incumbent_config)) => {
                prefer(total, &config, *incumbent, incumbent_config)
            }
        };
        if replace {
            best = Some((total, config));
        }
    }
    let (_, best_config) = best.ok_or_else(|| {
        ShiftscanError::invalid_series(
            "no configuration is feasible for this model and series length",
        )
    })?;
    let best_score = score_of(&objective, &best_config, penalty_kind, n)?;
    Ok(SearchResult {
        best_config,
        best_score,
        evaluations,
        history: Vec::new(),
    })
}

/// Minimizes the penalized likelihood with a genetic algorithm.
///
/// The initial population always contains the all-zero chromosome (the
/// no-changepoint null) plus sparse random chromosomes averaging one to
/// three changepoints. Fitness values are cached across generations, and
/// only uncached chromosomes are (re-)fit, in parallel; results do not
/// depend on the worker-thread count because the single RNG stream drives
/// genetic operations only.
pub fn genetic_search(
    series: &Series,
    kind: SegmentModelKind,
    penalty_kind: PenaltyKind,
    settings: &GaSettings,
) -> Result<SearchResult> {
    let n = series.len();
    if n < 4 {
        return Err(ShiftscanError::invalid_parameter(format!(
            "genetic search needs at least 4 observations, got {n}"
        )));
    }
    validate_settings(settings)?;
    let bits_len = n - 1;
    let mutation_rate = settings
        .mutation_rate
        .unwrap_or(1.0 / bits_len as f64);

    let objective = Objective::new(series, kind)?;
    let penalties: Vec<f64> = (0..n).map(|m| penalty(penalty_kind, m, n)).collect();
    let eval_total = |bits: &[bool]| -> f64 {
        let config = decode(bits);
        match objective.neg2loglik(&config) {
            Ok(neg2) => neg2 + penalties[config.num_changepoints()],
            Err(_) => f64::INFINITY, // infeasible configurations lose every comparison
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let mut population: Vec<Vec<bool>> = Vec::with_capacity(settings.population_size);
    population.push(vec![false; bits_len]);
    while population.len() < settings.population_size {
        let expected_bits = rng.random_range(1..=3) as f64;
        let prob = (expected_bits / bits_len as f64).min(1.0);
        population.push((0..bits_len).map(|_| rng.random_bool(prob)).collect());
    }

    let mut cache: HashMap<Vec<bool>, f64> = HashMap::new();
    let mut evaluations = 0u64;
    let mut history = Vec::new();
    let mut best: Option<(f64, ChangepointConfiguration)> = None;
    let mut stagnation = 0usize;

    for generation in 0..settings.max_generations {
        // Fit the chromosomes this generation introduced, in parallel.
        let mut seen = HashSet::new();
        let pending: Vec<Vec<bool>> = population
            .iter()
            .filter(|bits| !cache.contains_key(*bits) && seen.insert((*bits).clone()))
            .cloned()
            .collect();
        let scores: Vec<f64> = parallel::pool()
            .install(|| pending.par_iter().map(|bits| eval_total(bits)).collect());
        evaluations += pending.len() as u64;
        for (bits, score) in pending.into_iter().zip(scores) {
            cache.insert(bits, score);
        }
        let fitness: Vec<f64> = population
            .iter()
            .map(|bits| cache[bits])
            .collect();

        // Generation best; elitism makes this sequence nonincreasing.
        let gen_best_idx = (0..fitness.len())
            .min_by(|&a, &b| fitness[a].total_cmp(&fitness[b]))
            .expect("population is nonempty");
        let gen_best_total = fitness[gen_best_idx];
        history.push(gen_best_total);

        // Update the global best with the shared tie-breaking rule.
        let mut improved = false;
        for (bits, &total) in population.iter().zip(&fitness) {
            if !total.is_finite() {
                continue;
            }
            let config = decode(bits);
            match &best {
                None => {
                    best = Some((total, config));
                    improved = true;
                }
                Some((incumbent, incumbent_config)) => {
                    if total < *incumbent {
                        improved = true;
                    }
                    if prefer(total, &config, *incumbent, incumbent_config) {
                        best = Some((total, config));
                    }
                }
            }
        }
        stagnation = if improved { 0 } else { stagnation + 1 };
        if stagnation >= settings.stagnation_limit || generation + 1 == settings.max_generations {
            break;
        }

        // Breed the next generation: elites first, then tournament winners.
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]));
        let mut next: Vec<Vec<bool>> = order
            .iter()
            .take(settings.elitism)
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < settings.population_size {
            let a = tournament(&mut rng, &fitness);
            let b = tournament(&mut rng, &fitness);
            let mut child = if rng.random_bool(settings.crossover_rate) {
                population[a]
                    .iter()
                    .zip(&population[b])
                    .map(|(&x, &y)| if rng.random_bool(0.5) { x } else { y })
                    .collect()
            } else {
                population[a].clone()
            };
            for bit in child.iter_mut() {
                if rng.random_bool(mutation_rate) {
                    *bit = !*bit;
                }
            }
            next.push(child);
        }
        population = next;
    }

    let (_, best_config) = best.ok_or_else(|| {
        ShiftscanError::invalid_series(
            "no configuration is feasible for this model and series length",
        )
    })?;
    let best_score = score_of(&objective, &best_config, penalty_kind, n)?;
    Ok(SearchResult {
        best_config,
        best_score,
        evaluations,
        history,
    })
}

fn validate_settings(settings: &GaSettings) -> Result<()> {
    if settings.population_size < 2 {
        return Err(ShiftscanError::invalid_parameter(
            "population size must be at least 2",
        ));
    }
    if settings.max_generations < 1 {
        return Err(ShiftscanError::invalid_parameter(
            "need at least one generation",
        ));
    }
    if settings.stagnation_limit < 1 {
        return Err(ShiftscanError::invalid_parameter(
            "stagnation limit must be at least 1",
        ));
    }
    if !(0.0..=1.0).contains(&settings.crossover_rate) {
        return Err(ShiftscanError::invalid_parameter(format!(
            "crossover rate {} is outside [0, 1]",
            settings.crossover_rate
        )));
    }
    if let Some(rate) = settings.mutation_rate {
        if !(0.0..=1.0).contains(&rate) {
            return Err(ShiftscanError::invalid_parameter(format!(
                "mutation rate {rate} is outside [0, 1]"
            )));
        }
    }
    if settings.elitism >= settings.population_size {
        return Err(ShiftscanError::invalid_parameter(
            "elitism must leave room for offspring",
        ));
    }
    Ok(())
}

/// Decodes a chromosome: bit `j` set means a changepoint at index `j + 2`.
fn decode(bits: &[bool]) -> ChangepointConfiguration {
    let taus: Vec<usize> = bits
        .iter()
        .enumerate()
        .filter_map(|(j, &b)| b.then_some(j + 2))
        .collect();
    ChangepointConfiguration::new(taus).expect("decoded indices are sorted and >= 2")
}

/// Two-entrant tournament: the lower total wins; the first draw wins ties.
fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64]) -> usize {
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..TOURNAMENT_SIZE {
        let challenger = rng.random_range(0..fitness.len());
        if fitness[challenger] < fitness[winner] {
            winner = challenger;
        }
    }
    winner
}

/// Shared tie-breaking rule: lower total wins; on exactly equal totals,
/// fewer changepoints win, then lexicographically smaller indices.
fn prefer(
    total: f64,
    config: &ChangepointConfiguration,
    incumbent_total: f64,
    incumbent: &ChangepointConfiguration,
) -> bool {
    if total < incumbent_total {
        return true;
    }
    if total > incumbent_total {
        return false;
    }
    match config.num_changepoints().cmp(&incumbent.num_changepoints()) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => config.taus() < incumbent.taus(),
    }
}

/// Re-scores the winner through the same objective, so the reported score
/// is exactly what re-evaluating the configuration produces.
fn score_of(
    objective: &Objective,
    config: &ChangepointConfiguration,
    penalty_kind: PenaltyKind,
    n: usize,
) -> Result<PenalizedScore> {
    let neg2loglik = objective.neg2loglik(config)?;
    let pen = penalty(penalty_kind, config.num_changepoints(), n);
    Ok(PenalizedScore {
        neg2loglik,
        penalty: pen,
        total: neg2loglik + pen,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn series(values: Vec<f64>) -> Series {
        Series::continuous(values).expect("valid series")
    }

    /// A flat series whose only variation is rounding noise: the variance
    /// floor clamps every configuration, so the penalty alone (plus the
    /// tie-breaking rule) must select the empty configuration.
    fn machine_noise_series(n: usize) -> Series {
        let values = (0..n)
            .map(|i| 1.0 + if i % 2 == 0 { f64::EPSILON } else { -f64::EPSILON })
            .collect();
        series(values)
    }

    fn noisy_steps(seed: u64, lens: &[usize], levels: &[f64], sd: f64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::new();
        for (&len, &level) in lens.iter().zip(levels) {
            for _ in 0..len {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(level + sd * z);
            }
        }
        series(values)
    }

    #[test]
    fn exhaustive_counts_every_configuration() {
        let s = noisy_steps(3, &[6, 5], &[0.0, 4.0], 0.5);
        let result = exhaustive_search(
            &s,
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            None,
        )
        .expect("runs");
        assert_eq!(result.evaluations, 1024, "2^(11-1) configurations");
        assert!(result.history.is_empty());
    }

    #[test]
    fn exhaustive_refuses_series_beyond_the_cap() {
        let s = noisy_steps(4, &[30], &[0.0], 1.0);
        let err = exhaustive_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, None);
        match err {
            Err(ShiftscanError::SeriesTooLong { n, max_n, .. }) => {
                assert_eq!(n, 30);
                assert_eq!(max_n, 24);
            }
            other => panic!("expected SeriesTooLong, got {other:?}"),
        }
        // An explicit cap replaces the default entirely, so a cap below the
        // default rejects series the default would have accepted.
        let short = noisy_steps(6, &[10], &[0.0], 1.0);
        let tightened = exhaustive_search(
            &short,
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            Some(8),
        );
        match tightened {
            Err(ShiftscanError::SeriesTooLong { n, max_n, .. }) => {
                assert_eq!(n, 10);
                assert_eq!(max_n, 8);
            }
            other => panic!("expected SeriesTooLong, got {other:?}"),
        }
    }

    #[test]
    fn trend_model_has_a_tighter_default_cap() {
        assert_eq!(default_exhaustive_cap(SegmentModelKind::GaussTrendAr1), 16);
        assert_eq!(default_exhaustive_cap(SegmentModelKind::GaussIid), 24);
        let s = noisy_steps(5, &[20], &[0.0], 1.0);
        let err = exhaustive_search(
            &s,
            SegmentModelKind::GaussTrendAr1,
            PenaltyKind::Bic,
            None,
        );
        assert!(matches!(err, Err(ShiftscanError::SeriesTooLong { .. })));
    }

    #[test]
    fn flat_series_selects_the_empty_configuration() {
        let result = exhaustive_search(
            &machine_noise_series(10),
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            None,
        )
        .expect("runs");
        assert!(result.best_config.is_empty());
    }

    #[test]
    fn exhaustive_recovers_a_clean_level_shift() {
        // With zero residual variation the variance floor puts every
        // exact-fit configuration on an equal likelihood, so the penalty
        // picks out the most parsimonious one: the planted shift.
        let mut values = vec![0.0; 8];
        values.extend(vec![3.0; 8]);
        let s = series(values);
        let result = exhaustive_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, None)
            .expect("runs");
        assert_eq!(result.best_config.num_changepoints(), 1);
        assert_eq!(result.best_config.taus(), &[8]);
        assert!(
            (result.best_score.total
                - (result.best_score.neg2loglik + result.best_score.penalty))
                .abs()
                < 1e-12
        );
    }

    #[test]
    fn exhaustive_recovers_a_planted_rate_shift() {
        // Counts alternate within each regime, so no sub-split offers a
        // likelihood gain anywhere near the per-changepoint penalty.
        let mut counts: Vec<f64> = Vec::new();
        for i in 0..8 {
            counts.push(if i % 2 == 0 { 3.0 } else { 4.0 });
        }
        for i in 0..8 {
            counts.push(if i % 2 == 0 { 12.0 } else { 13.0 });
        }
        let s = Series::counts(counts).expect("valid counts");
        let result = exhaustive_search(&s, SegmentModelKind::Poisson, PenaltyKind::Bic, None)
            .expect("runs");
        assert_eq!(result.best_config.taus(), &[8]);
    }

    #[test]
    fn noisy_gaussian_data_rewards_near_saturated_fits() {
        // The pooled maximum-likelihood variance shrinks without bound as a
        // configuration approaches an interpolating fit, and a penalty that
        // is linear in the number of changepoints cannot keep up.  On data
        // with genuine residual noise the exact optimum therefore carves
        // almost every observation into its own regime.  This is a property
        // of the objective, not a search defect; callers who want a
        // parsimonious answer on noisy continuous data should rely on the
        // CUSUM-based segmenters instead.
        let s = noisy_steps(21, &[8, 8], &[0.0, 3.0], 0.7);
        let result = exhaustive_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, None)
            .expect("runs");
        assert!(
            result.best_config.num_changepoints() > 8,
            "expected a near-saturated optimum, got {:?}",
            result.best_config.taus()
        );
    }

    #[test]
    fn ga_matches_exhaustive_on_a_searchable_series() {
        let s = noisy_steps(8, &[9, 11], &[0.0, 2.5], 0.8);
        let exhaustive =
            exhaustive_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, None)
                .expect("runs");
        let ga = genetic_search(
            &s,
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            &GaSettings::default(),
        )
        .expect("runs");
        assert_eq!(ga.best_config, exhaustive.best_config);
        assert_eq!(
            ga.best_score.total.to_bits(),
            exhaustive.best_score.total.to_bits(),
            "identical configuration must score identically"
        );
    }

    #[test]
    fn ga_returns_empty_config_when_null_is_optimal() {
        let result = genetic_search(
            &machine_noise_series(12),
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            &GaSettings::default(),
        )
        .expect("runs");
        assert!(result.best_config.is_empty());
    }

    #[test]
    fn ga_history_is_nonincreasing_and_seed_deterministic() {
        let s = noisy_steps(13, &[15, 10, 15], &[0.0, 3.0, 1.0], 1.0);
        let settings = GaSettings {
            seed: 99,
            ..GaSettings::default()
        };
        let a = genetic_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, &settings)
            .expect("runs");
        for w in a.history.windows(2) {
            assert!(
                w[1] <= w[0] + 1e-12,
                "history must be nonincreasing: {} then {}",
                w[0],
                w[1]
            );
        }
        let b = genetic_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, &settings)
            .expect("runs");
        assert_eq!(a.best_config, b.best_config);
        assert_eq!(a.evaluations, b.evaluations);
        assert_eq!(a.history.len(), b.history.len());
        for (x, y) in a.history.iter().zip(&b.history) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn ga_validates_inputs() {
        let s = machine_noise_series(8);
        let tiny = series(vec![1.0, 2.0, 3.0]);
        assert!(genetic_search(
            &tiny,
            SegmentModelKind::GaussIid,
            PenaltyKind::Bic,
            &GaSettings::default()
        )
        .is_err());
        for bad in [
            GaSettings { population_size: 1, ..GaSettings::default() },
            GaSettings { crossover_rate: 1.5, ..GaSettings::default() },
            GaSettings { mutation_rate: Some(-0.1), ..GaSettings::default() },
            GaSettings { elitism: 100, ..GaSettings::default() },
            GaSettings { max_generations: 0, ..GaSettings::default() },
            GaSettings { stagnation_limit: 0, ..GaSettings::default() },
        ] {
            assert!(
                genetic_search(&s, SegmentModelKind::GaussIid, PenaltyKind::Bic, &bad).is_err()
            );
        }
    }

    #[test]
    fn tie_breaking_prefers_fewer_then_smaller() {
        let empty = ChangepointConfiguration::empty();
        let two = ChangepointConfiguration::new(vec![2]).expect("valid");
        let three = ChangepointConfiguration::new(vec![3]).expect("valid");
        assert!(prefer(1.0, &empty, 1.0, &two));
        assert!(!prefer(1.0, &two, 1.0, &empty));
        assert!(prefer(1.0, &two, 1.0, &three));
        assert!(!prefer(1.0, &three, 1.0, &two));
        assert!(prefer(0.5, &three, 1.0, &empty), "lower total always wins");
    }

    #[test]
    fn decode_maps_bits_to_indices() {
        let config = decode(&[true, false, true, false]);
        assert_eq!(config.taus(), &[2, 4]);
        assert!(decode(&[false; 7]).is_empty());
    }
}
