// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic series with known ground truth, for calibration studies and
//! end-to-end testing of the detectors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Result, ShiftscanError};
use crate::models::SegmentModelKind;
use crate::types::{partition, ChangepointConfiguration, Series};

/// Ground-truth description of a series to simulate.
#[derive(Debug, Clone)]
pub struct SimulationSpec {
    /// Which observation model to draw from.
    pub kind: SegmentModelKind,
    /// Series length.
    pub n: usize,
    /// True changepoints; each must leave a nonempty regime on both sides.
    pub taus: Vec<usize>,
    /// Per-regime levels (Gaussian models) or rates (Poisson); one per
    /// regime, i.e. `taus.len() + 1` entries.
    pub levels: Vec<f64>,
    /// Shared linear trend; only the trend + AR(1) model supports one.
    pub beta: f64,
    /// AR(1) coefficient; only the trend + AR(1) model supports one.
    pub phi: f64,
    /// Innovation standard deviation for the Gaussian models. Ignored by
    /// Poisson, whose dispersion is its rate.
    pub sigma: f64,
    /// RNG seed; fixed seed means bit-identical output.
    pub seed: u64,
}

impl SimulationSpec {
    /// A no-trend, no-autocorrelation Gaussian spec: step means plus white
    /// noise.
    pub fn gauss_iid(n: usize, taus: Vec<usize>, levels: Vec<f64>, sigma: f64, seed: u64) -> Self {
        Self {
            kind: SegmentModelKind::GaussIid,
            n,
            taus,
            levels,
            beta: 0.0,
            phi: 0.0,
            sigma,
            seed,
        }
    }
}

/// Draws a series from the spec. Time labels are `1..=n`.
pub fn simulate(spec: &SimulationSpec) -> Result<Series> {
    if spec.n < 2 {
        return Err(ShiftscanError::invalid_parameter(format!(
            "simulated series needs at least 2 observations, got {}",
            spec.n
        )));
    }
    let config = ChangepointConfiguration::new(spec.taus.clone())?;
    if spec.taus.last().is_some_and(|&tau| tau >= spec.n) {
        return Err(ShiftscanError::invalid_configuration(format!(
            "true changepoint {} leaves no regime after it (n = {})",
            spec.taus.last().expect("nonempty"),
            spec.n
        )));
    }
    let part = partition(&config, spec.n)?;
    if spec.levels.len() != part.num_regimes() {
        return Err(ShiftscanError::invalid_parameter(format!(
            "{} changepoint(s) define {} regime(s) but {} level(s) were given",
            spec.taus.len(),
            part.num_regimes(),
            spec.levels.len()
        )));
    }
    if spec.kind != SegmentModelKind::GaussTrendAr1 && (spec.beta != 0.0 || spec.phi != 0.0) {
        return Err(ShiftscanError::invalid_parameter(format!(
            "trend/autocorrelation parameters are only supported by the {} model",
            SegmentModelKind::GaussTrendAr1.name()
        )));
    }
    if !spec.phi.is_finite() || spec.phi.abs() > crate::models::PHI_BOUND {
        return Err(ShiftscanError::invalid_parameter(format!(
            "autocorrelation {} is outside [-{b}, {b}]",
            spec.phi,
            b = crate::models::PHI_BOUND
        )));
    }
    if !spec.beta.is_finite() {
        return Err(ShiftscanError::invalid_parameter("trend must be finite"));
    }

    // Per-observation regime level, in index order.
    let mut level_at = Vec::with_capacity(spec.n);
    for (regime, &(start, end)) in part.segments().iter().enumerate() {
        for _ in start..=end {
            level_at.push(spec.levels[regime]);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = match spec.kind {
        SegmentModelKind::GaussIid => {
            if !(spec.sigma.is_finite() && spec.sigma >= 0.0) {
                return Err(ShiftscanError::invalid_parameter(format!(
                    "noise standard deviation {} must be nonnegative",
                    spec.sigma
                )));
            }
            level_at
                .iter()
                .map(|&mu| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    mu + spec.sigma * z
                })
                .collect()
        }
        SegmentModelKind::GaussTrendAr1 => {
            if !(spec.sigma.is_finite() && spec.sigma >= 0.0) {
                return Err(ShiftscanError::invalid_parameter(format!(
                    "noise standard deviation {} must be nonnegative",
                    spec.sigma
                )));
            }
            // Stationary AR(1) noise: the first draw uses the stationary
            // variance sigma^2 / (1 - phi^2).
            let mut values = Vec::with_capacity(spec.n);
            let z: f64 = StandardNormal.sample(&mut rng);
            let mut noise = spec.sigma * z / (1.0 - spec.phi * spec.phi).sqrt();
            for (t, &level) in level_at.iter().enumerate() {
                values.push(level + spec.beta * (t + 1) as f64 + noise);
                let z: f64 = StandardNormal.sample(&mut rng);
                noise = spec.phi * noise + spec.sigma * z;
            }
            values
        }
        SegmentModelKind::Poisson => {
            for (i, &rate) in spec.levels.iter().enumerate() {
                if !(rate.is_finite() && rate >= 0.0) {
                    return Err(ShiftscanError::invalid_parameter(format!(
                        "Poisson rate {rate} for regime {} must be nonnegative",
                        i + 1
                    )));
                }
            }
            level_at
                .iter()
                .map(|&rate| {
                    if rate == 0.0 {
                        0.0
                    } else {
                        let draw: f64 = Poisson::new(rate)
                            .expect("positive finite rate")
                            .sample(&mut rng);
                        draw
                    }
                })
                .collect()
        }
    };

    match spec.kind {
        SegmentModelKind::Poisson => Series::counts(values),
        _ => Series::continuous(values),
    }
}
