// SPDX-License-Identifier: MIT OR Apache-2.0

//! Gaussian segment model with per-regime intercepts, one shared linear
//! trend, and stationary AR(1) errors, fit by exact (not conditional)
//! maximum likelihood.
//!
//! The mean is `mu_t = delta_i + beta * t` for `t` in regime `i`. Errors
//! follow a stationary AR(1) with coefficient `phi`, so the Prais-Winsten
//! whitening — scale row 1 by `sqrt(1 - phi^2)`, replace row `t >= 2` by
//! `row_t - phi * row_{t-1}` — turns the generalized least-squares problem
//! into an ordinary one. With the innovation variance profiled out at
//! `sigma_hat^2(phi) = RSS_w(phi) / N`, the concentrated deviance is
//!
//! ```text
//! -2 ln L(phi) = N ln(2 pi sigma_hat^2(phi)) + N - ln(1 - phi^2)
//! ```
//!
//! where the last term is the stationary correction from the exact
//! likelihood of the first observation. `phi` is profiled over
//! `[-0.999, 0.999]` by a coarse grid followed by golden-section refinement.
//!
//! Because each design row has exactly two nonzero entries (one regime
//! indicator and the time column), the whitened normal equations are a
//! quadratic polynomial in `phi` whose coefficient matrices are assembled
//! once per configuration; each `phi` evaluation then costs only a small
//! dense solve in the `(m + 2)`-dimensional parameter space.

use crate::error::{Result, ShiftscanError};
use crate::models::{variance_floor, SegmentFit, SegmentModelKind};
use crate::types::{partition, ChangepointConfiguration};

/// The autocorrelation coefficient is profiled over `[-PHI_BOUND, PHI_BOUND]`.
pub const PHI_BOUND: f64 = 0.999;

const GRID_POINTS: usize = 41;
const GOLDEN_RATIO_CONJ: f64 = 0.618_033_988_749_894_9;
const GOLDEN_TOL: f64 = 1e-10;
const MAX_GOLDEN_ITERS: usize = 80;

/// Whole-series state for the trend + AR(1) model.
pub(crate) struct TrendAr1Context {
    values: Vec<f64>,
    n: usize,
    floor: f64,
}

impl TrendAr1Context {
    pub(crate) fn new(values: &[f64]) -> Self {
        Self {
            values: values.to_vec(),
            n: values.len(),
            floor: variance_floor(values),
        }
    }

    pub(crate) fn neg2loglik(&self, config: &ChangepointConfiguration) -> Result<f64> {
        self.fit(config).map(|fit| fit.neg2loglik)
    }

    /// Full fit with `phi` profiled over the grid plus golden-section
    /// refinement.
    pub(crate) fn fit(&self, config: &ChangepointConfiguration) -> Result<SegmentFit> {
        let design = self.design(config)?;
        let step = 2.0 * PHI_BOUND / (GRID_POINTS - 1) as f64;
        let mut best: Option<(f64, Evaluation)> = None;
        for i in 0..GRID_POINTS {
            let phi = -PHI_BOUND + step * i as f64;
            let eval = self.evaluate(&design, phi)?;
            if best.as_ref().is_none_or(|(_, b)| eval.neg2loglik < b.neg2loglik) {
                best = Some((phi, eval));
            }
        }
        let (grid_phi, mut best_eval) = best.expect("grid is nonempty");
        let mut best_phi = grid_phi;

        // Golden-section refinement on the bracketing grid interval.
        let mut lo = (grid_phi - step).max(-PHI_BOUND);
        let mut hi = (grid_phi + step).min(PHI_BOUND);
        let mut x1 = hi - GOLDEN_RATIO_CONJ * (hi - lo);
        let mut x2 = lo + GOLDEN_RATIO_CONJ * (hi - lo);
        let mut f1 = self.evaluate(&design, x1)?;
        let mut f2 = self.evaluate(&design, x2)?;
        for _ in 0..MAX_GOLDEN_ITERS {
            if f1.neg2loglik < best_eval.neg2loglik {
                best_phi = x1;
                best_eval = f1.clone();
            }
            if f2.neg2loglik < best_eval.neg2loglik {
                best_phi = x2;
                best_eval = f2.clone();
            }
            if hi - lo < GOLDEN_TOL {
                break;
            }
            if f1.neg2loglik <= f2.neg2loglik {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - GOLDEN_RATIO_CONJ * (hi - lo);
                f1 = self.evaluate(&design, x1)?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + GOLDEN_RATIO_CONJ * (hi - lo);
                f2 = self.evaluate(&design, x2)?;
            }
        }

        Ok(self.finish(config, &design, best_phi, best_eval))
    }

    /// Fit with the autocorrelation pinned at a fixed `phi` instead of
    /// profiled. `phi = 0` reduces to ordinary least squares.
    pub(crate) fn fit_with_phi(
        &self,
        config: &ChangepointConfiguration,
        phi: f64,
    ) -> Result<SegmentFit> {
        if !phi.is_finite() || phi.abs() > PHI_BOUND {
            return Err(ShiftscanError::invalid_parameter(format!(
                "autocorrelation {phi} is outside [-{PHI_BOUND}, {PHI_BOUND}]"
            )));
        }
        let design = self.design(config)?;
        let eval = self.evaluate(&design, phi)?;
        Ok(self.finish(config, &design, phi, eval))
    }

    fn design(&self, config: &ChangepointConfiguration) -> Result<Design> {
        let m = config.num_changepoints();
        if self.n < m + 3 {
            return Err(ShiftscanError::invalid_configuration(format!(
                "fitting {m} changepoint(s) with a shared trend and AR(1) errors needs at \
                 least {} observations, got {}",
                m + 3,
                self.n
            )));
        }
        let part = partition(config, self.n)?;
        Ok(Design::assemble(&self.values, part.segments()))
    }

    fn evaluate(&self, design: &Design, phi: f64) -> Result<Evaluation> {
        let solved = design.solve_at(phi).map_err(|col| {
            ShiftscanError::SingularFit(format!(
                "normal equations are singular at the {} column; the regimes and trend \
                 are not separately identifiable for this configuration",
                design.column_name(col)
            ))
        })?;
        let n = self.n as f64;
        let sigma2 = (solved.rss / n).max(self.floor);
        let neg2loglik =
            n * (2.0 * std::f64::consts::PI * sigma2).ln() + n - (1.0 - phi * phi).ln();
        Ok(Evaluation {
            theta: solved.theta,
            rss: solved.rss,
            neg2loglik,
        })
    }

    fn finish(
        &self,
        config: &ChangepointConfiguration,
        design: &Design,
        phi: f64,
        eval: Evaluation,
    ) -> SegmentFit {
        let n = self.n as f64;
        let raw = eval.rss / n;
        let degenerate = raw < self.floor;
        let sigma2 = raw.max(self.floor);
        let regimes = design.p - 1;
        SegmentFit {
            kind: SegmentModelKind::GaussTrendAr1,
            config: config.clone(),
            deltas: eval.theta[..regimes].to_vec(),
            beta: Some(eval.theta[regimes]),
            phi: Some(phi),
            sigma2: Some(sigma2),
            neg2loglik: eval.neg2loglik,
            degenerate,
        }
    }
}

#[derive(Clone)]
struct Evaluation {
    theta: Vec<f64>,
    rss: f64,
    neg2loglik: f64,
}

struct Solved {
    theta: Vec<f64>,
    rss: f64,
}

/// Per-configuration moment matrices. Writing the whitened design rows as
/// `r_tilde_1 = sqrt(1 - phi^2) r_1` and `r_tilde_t = r_t - phi r_{t-1}`,
/// the Gram matrix, moment vector, and whitened response energy are all
/// quadratics in `phi`:
///
/// ```text
/// G(phi)  = (1 - phi^2) r_1 r_1' + A - phi (B + B') + phi^2 C
/// g(phi)  = (1 - phi^2) y_1 r_1  + a - phi b        + phi^2 d
/// yss(phi) = (1 - phi^2) y_1^2   + syy - 2 phi sylag + phi^2 slag2
/// ```
///
/// with `A = sum_{t>=2} r_t r_t'`, `B = sum r_t r_{t-1}'`,
/// `C = sum r_{t-1} r_{t-1}'`, `a = sum y_t r_t`,
/// `b = sum (y_t r_{t-1} + y_{t-1} r_t)`, `d = sum y_{t-1} r_{t-1}`.
struct Design {
    /// Parameter count: one indicator per regime plus the trend column.
    p: usize,
    r1r1: Mat,
    a_mat: Mat,
    b_sym: Mat,
    c_mat: Mat,
    y1r1: Vec<f64>,
    a_vec: Vec<f64>,
    b_vec: Vec<f64>,
    d_vec: Vec<f64>,
    y1sq: f64,
    syy: f64,
    sylag: f64,
    slag2: f64,
}

impl Design {
    fn assemble(values: &[f64], segments: &[(usize, usize)]) -> Self {
        let n = values.len();
        let regimes = segments.len();
        let p = regimes + 1;

        // regime_of[t - 1] for t = 1..=n.
        let mut regime_of = vec![0usize; n];
        for (idx, &(start, end)) in segments.iter().enumerate() {
            for t in start..=end {
                regime_of[t - 1] = idx;
            }
        }
        // Row t has exactly two nonzero entries.
        let row = |t: usize| -> [(usize, f64); 2] {
            [(regime_of[t - 1], 1.0), (p - 1, t as f64)]
        };

        let mut d = Design {
            p,
            r1r1: Mat::zeros(p),
            a_mat: Mat::zeros(p),
            b_sym: Mat::zeros(p),
            c_mat: Mat::zeros(p),
            y1r1: vec![0.0; p],
            a_vec: vec![0.0; p],
            b_vec: vec![0.0; p],
            d_vec: vec![0.0; p],
            y1sq: values[0] * values[0],
            syy: 0.0,
            sylag: 0.0,
            slag2: 0.0,
        };

        let r1 = row(1);
        for &(i, wi) in &r1 {
            for &(j, wj) in &r1 {
                d.r1r1.add(i, j, wi * wj);
            }
            d.y1r1[i] += values[0] * wi;
        }
        for t in 2..=n {
            let rt = row(t);
            let rp = row(t - 1);
            let yt = values[t - 1];
            let yp = values[t - 2];
            for &(i, wi) in &rt {
                for &(j, wj) in &rt {
                    d.a_mat.add(i, j, wi * wj);
                }
                d.a_vec[i] += yt * wi;
                d.b_vec[i] += yp * wi;
            }
            for &(i, wi) in &rp {
                for &(j, wj) in &rp {
                    d.c_mat.add(i, j, wi * wj);
                }
                d.d_vec[i] += yp * wi;
                d.b_vec[i] += yt * wi;
            }
            for &(i, wi) in &rt {
                for &(j, wj) in &rp {
                    // B + B' accumulated directly.
                    d.b_sym.add(i, j, wi * wj);
                    d.b_sym.add(j, i, wi * wj);
                }
            }
            d.syy += yt * yt;
            d.sylag += yt * yp;
            d.slag2 += yp * yp;
        }
        d
    }

    /// Solves the whitened normal equations at `phi`; `Err(col)` reports a
    /// singular pivot column.
    fn solve_at(&self, phi: f64) -> std::result::Result<Solved, usize> {
        let s = 1.0 - phi * phi;
        let p = self.p;
        let mut gram = Mat::zeros(p);
        for i in 0..p {
            for j in 0..p {
                let v = s * self.r1r1.get(i, j) + self.a_mat.get(i, j)
                    - phi * self.b_sym.get(i, j)
                    + phi * phi * self.c_mat.get(i, j);
                gram.set(i, j, v);
            }
        }
        let mut rhs = vec![0.0; p];
        for i in 0..p {
            rhs[i] = s * self.y1r1[i] + self.a_vec[i] - phi * self.b_vec[i]
                + phi * phi * self.d_vec[i];
        }
        let yss = s * self.y1sq + self.syy - 2.0 * phi * self.sylag + phi * phi * self.slag2;
        let theta = gram.solve(&rhs)?;
        let explained: f64 = theta.iter().zip(&rhs).map(|(t, g)| t * g).sum();
        Ok(Solved {
            rss: (yss - explained).max(0.0),
            theta,
        })
    }

    fn column_name(&self, col: usize) -> String {
        if col + 1 < self.p {
            format!("regime {} level", col + 1)
        } else {
            "shared trend".to_string()
        }
    }
}

/// Minimal dense row-major square matrix with a partial-pivoting solver.
/// The parameter dimension is `m + 2`, small enough that anything fancier
/// would be overhead; owning the solver also lets singularity errors name
/// the offending column.
struct Mat {
    p: usize,
    a: Vec<f64>,
}

impl Mat {
    fn zeros(p: usize) -> Self {
        Self { p, a: vec![0.0; p * p] }
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.p + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.p + j] = v;
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.p + j] += v;
    }

    /// Gaussian elimination with partial pivoting; `Err(col)` flags the
    /// column whose pivot vanished.
    fn solve(&self, rhs: &[f64]) -> std::result::Result<Vec<f64>, usize> {
        let p = self.p;
        let mut a = self.a.clone();
        let mut b = rhs.to_vec();
        let scale = a.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
        let tol = if scale > 0.0 { scale * 1e-13 } else { f64::MIN_POSITIVE };

        for k in 0..p {
            let mut pivot_row = k;
            let mut pivot_abs = a[k * p + k].abs();
            for i in (k + 1)..p {
                let cand = a[i * p + k].abs();
                if cand > pivot_abs {
                    pivot_abs = cand;
                    pivot_row = i;
                }
            }
            if pivot_abs <= tol {
                return Err(k);
            }
            if pivot_row != k {
                for j in 0..p {
                    a.swap(k * p + j, pivot_row * p + j);
                }
                b.swap(k, pivot_row);
            }
            let pivot = a[k * p + k];
            for i in (k + 1)..p {
                let factor = a[i * p + k] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in k..p {
                    a[i * p + j] -= factor * a[k * p + j];
                }
                b[i] -= factor * b[k];
            }
        }
        let mut x = vec![0.0; p];
        for k in (0..p).rev() {
            let mut acc = b[k];
            for j in (k + 1)..p {
                acc -= a[k * p + j] * x[j];
            }
            x[k] = acc / a[k * p + k];
        }
        Ok(x)
    }
}
