//! Gaussian skill ratings with moment-matched updates.
//!
//! Each agent's skill is N(mu, sigma^2). A two-player result truncates the
//! Gaussian of the performance difference to the observed region (win beyond
//! the draw margin, or draw within it) and matches moments. Multi-seat
//! rankings decompose into pairwise results. Leaderboards sort by the
//! conservative estimate mu - 3 sigma.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rating {
    pub mu: f64,
    pub sigma: f64,
}

impl Rating {
    pub const fn new(mu: f64, sigma: f64) -> Self {
        Rating { mu, sigma }
    }

    /// mu - 3 sigma.
    pub fn conservative(&self) -> f64 {
        self.mu - 3.0 * self.sigma
    }
}

pub fn conservative(r: &Rating) -> f64 {
    r.conservative()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RatingParams {
    pub mu0: f64,
    pub sigma0: f64,
    pub beta: f64,
    pub tau: f64,
    pub draw_probability: f64,
}

impl Default for RatingParams {
    fn default() -> Self {
        RatingParams {
            mu0: 25.0,
            sigma0: 25.0 / 3.0,
            beta: 25.0 / 6.0,
            tau: 25.0 / 300.0,
            draw_probability: 0.10,
        }
    }
}

impl RatingParams {
    pub fn validate(&self) -> Result<(), RatingError> {
        let finite = [
            self.mu0,
            self.sigma0,
            self.beta,
            self.tau,
            self.draw_probability,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite || self.sigma0 <= 0.0 || self.beta <= 0.0 || self.tau < 0.0 {
            return Err(RatingError::InvalidParams);
        }
        if !(0.0..1.0).contains(&self.draw_probability) {
            return Err(RatingError::InvalidParams);
        }
        Ok(())
    }

    /// Performance-difference margin inside which a game is a draw:
    /// Phi^-1((p + 1) / 2) * sqrt(2) * beta.
    pub fn draw_margin(&self) -> f64 {
        normal_ppf((self.draw_probability + 1.0) / 2.0) * SQRT_2 * self.beta
    }
}

pub fn new_rating(params: &RatingParams) -> Rating {
    Rating::new(params.mu0, params.sigma0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairOutcome {
    AWins,
    BWins,
    Draw,
}

impl PairOutcome {
    pub fn flipped(self) -> Self {
        match self {
            PairOutcome::AWins => PairOutcome::BWins,
            PairOutcome::BWins => PairOutcome::AWins,
            PairOutcome::Draw => PairOutcome::Draw,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatingError {
    #[error("rating update produced a non-finite value")]
    NonFinite,
    #[error("{ratings} ratings but {ranks} ranks")]
    LengthMismatch { ratings: usize, ranks: usize },
    #[error("rating parameters must be finite with positive sigma0 and beta, tau >= 0 and draw probability in [0, 1)")]
    InvalidParams,
}

pub fn normal_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Inverse of [`normal_cdf`] for p in (0, 1): a rational first guess
/// refined by Halley steps.
pub fn normal_ppf(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    let tail = |q: f64| {
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    let mut x = if p < 0.02425 {
        tail(libm::sqrt(-2.0 * libm::log(p)))
    } else if p > 1.0 - 0.02425 {
        -tail(libm::sqrt(-2.0 * libm::log(1.0 - p)))
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * libm::sqrt(2.0 * PI) * libm::exp(x * x / 2.0);
        x -= u / (1.0 + x * u / 2.0);
    }
    x
}

/// Mills ratio Q(z) / pdf(z), where Q is the upper tail. Far in the upper
/// tail both factors underflow, so the asymptotic series takes over.
fn mills(z: f64) -> f64 {
    if z < 25.0 {
        return 0.5 * libm::erfc(z / SQRT_2) / normal_pdf(z);
    }
    let r = 1.0 / (z * z);
    (1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)))) / z
}

/// Additive and multiplicative corrections for a win by margin `t` (in
/// units of c) against draw margin `e`. w lies in [0, 1] exactly; the clamp
/// absorbs rounding so a variance never grows from an update.
fn v_w_win(t: f64, e: f64) -> (f64, f64) {
    let x = t - e;
    let v = 1.0 / mills(-x);
    (v, (v * (v + x)).clamp(0.0, 1.0))
}

/// Draw corrections for `t >= 0`; the caller restores the sign. Both
/// numerator and denominator are scaled by pdf(t - e) so lopsided draws
/// stay finite.
fn v_w_draw(t: f64, e: f64) -> (f64, f64) {
    let ratio = libm::exp(-2.0 * e * t);
    let denom = mills(t - e) - ratio * mills(t + e);
    if denom.is_nan() || denom <= 0.0 {
        // Zero-width draw band: the difference is pinned at zero.
        return (-t, 1.0);
    }
    let v = (ratio - 1.0) / denom;
    let w = v * v + ((e - t) + (e + t) * ratio) / denom;
    (v, w.clamp(0.0, 1.0))
}

fn dynamics(r: Rating, tau: f64) -> (f64, f64) {
    (r.mu, r.sigma * r.sigma + tau * tau)
}

/// Posterior of a pair from priors whose variances already include the
/// dynamics term.
fn pair_posterior(
    (mu_a, var_a): (f64, f64),
    (mu_b, var_b): (f64, f64),
    outcome: PairOutcome,
    beta: f64,
    margin: f64,
) -> Result<((f64, f64), (f64, f64)), RatingError> {
    let c2 = 2.0 * beta * beta + (var_a + var_b);
    let c = libm::sqrt(c2);
    let e = margin / c;
    let (v, w) = match outcome {
        PairOutcome::AWins => v_w_win((mu_a - mu_b) / c, e),
        PairOutcome::BWins => {
            let (v, w) = v_w_win((mu_b - mu_a) / c, e);
            (-v, w)
        }
        PairOutcome::Draw => {
            let t = (mu_a - mu_b) / c;
            let (v, w) = v_w_draw(libm::fabs(t), e);
            (if t < 0.0 { -v } else { v }, w)
        }
    };
    let post = |mu: f64, var: f64, sign: f64| {
        let mu = mu + sign * var / c * v;
        let factor = (1.0 - var / c2 * w).max(f64::EPSILON);
        (mu, var * factor)
    };
    let a = post(mu_a, var_a, 1.0);
    let b = post(mu_b, var_b, -1.0);
    if [a.0, a.1, b.0, b.1].iter().all(|x| x.is_finite()) {
        Ok((a, b))
    } else {
        Err(RatingError::NonFinite)
    }
}

/// One two-player result. Dynamics (sigma^2 += tau^2) are applied first.
pub fn update_pair(
    a: Rating,
    b: Rating,
    outcome: PairOutcome,
    params: &RatingParams,
) -> Result<(Rating, Rating), RatingError> {
    let (pa, pb) = pair_posterior(
        dynamics(a, params.tau),
        dynamics(b, params.tau),
        outcome,
        params.beta,
        params.draw_margin(),
    )?;
    Ok((
        Rating::new(pa.0, libm::sqrt(pa.1)),
        Rating::new(pb.0, libm::sqrt(pb.1)),
    ))
}

/// Sum in a canonical order so the result does not depend on the order of
/// the inputs.
fn canonical_sum(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().sum()
}

fn canonical_product(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs.into_iter().product()
}

/// Multi-seat update from finish ranks (1 = best, equal ranks tie).
///
/// Every unordered pair contributes a two-player update computed from the
/// same priors (after one dynamics step per agent); mean shifts add and
/// variance reductions multiply. With two agents this is exactly
/// [`update_pair`].
pub fn update_ranked(
    ratings: &[Rating],
    finish_ranks: &[usize],
    params: &RatingParams,
) -> Result<Vec<Rating>, RatingError> {
    if ratings.len() != finish_ranks.len() {
        return Err(RatingError::LengthMismatch {
            ratings: ratings.len(),
            ranks: finish_ranks.len(),
        });
    }
    let n = ratings.len();
    let priors: Vec<(f64, f64)> = ratings.iter().map(|r| dynamics(*r, params.tau)).collect();
    let margin = params.draw_margin();
    let mut shifts: Vec<Vec<f64>> = alloc::vec![Vec::new(); n];
    let mut factors: Vec<Vec<f64>> = alloc::vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            let outcome = match finish_ranks[i].cmp(&finish_ranks[j]) {
                core::cmp::Ordering::Less => PairOutcome::AWins,
                core::cmp::Ordering::Greater => PairOutcome::BWins,
                core::cmp::Ordering::Equal => PairOutcome::Draw,
            };
            let (a, b) = pair_posterior(priors[i], priors[j], outcome, params.beta, margin)?;
            shifts[i].push(a.0 - priors[i].0);
            shifts[j].push(b.0 - priors[j].0);
            factors[i].push(a.1 / priors[i].1);
            factors[j].push(b.1 / priors[j].1);
        }
    }
    let out: Vec<Rating> = (0..n)
        .map(|i| {
            if shifts[i].is_empty() {
                return Rating::new(priors[i].0, libm::sqrt(priors[i].1));
            }
            let mu = if shifts[i].len() == 1 {
                // Keep the two-player case bit-identical to update_pair.
                priors[i].0 + shifts[i][0]
            } else {
                priors[i].0 + canonical_sum(core::mem::take(&mut shifts[i]))
            };
            let var = if factors[i].len() == 1 {
                priors[i].1 * factors[i][0]
            } else {
                priors[i].1 * canonical_product(core::mem::take(&mut factors[i]))
            };
            Rating::new(mu, libm::sqrt(var))
        })
        .collect();
    if out.iter().all(|r| r.mu.is_finite() && r.sigma.is_finite()) {
        Ok(out)
    } else {
        Err(RatingError::NonFinite)
    }
}

/// One agent's attempt at a single-player instance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SoloResult {
    pub success: bool,
    pub score: f64,
    pub steps: u64,
    pub time: f64,
}

/// Orders two attempts: success first, then higher score, fewer steps, less
/// time. Equal on every key is a draw.
pub fn compare_solo(a: &SoloResult, b: &SoloResult) -> PairOutcome {
    use core::cmp::Ordering::*;
    let ord = b
        .success
        .cmp(&a.success)
        .then(b.score.total_cmp(&a.score))
        .then(a.steps.cmp(&b.steps))
        .then(a.time.total_cmp(&b.time));
    match ord {
        Less => PairOutcome::AWins,
        Greater => PairOutcome::BWins,
        Equal => PairOutcome::Draw,
    }
}

/// Pairwise outcomes `(i, j, outcome)` for `i < j` among attempts on one
/// instance.
pub fn rate_single_player(results: &[SoloResult]) -> Vec<(usize, usize, PairOutcome)> {
    let mut out = Vec::new();
    for i in 0..results.len() {
        for j in i + 1..results.len() {
            out.push((i, j, compare_solo(&results[i], &results[j])));
        }
    }
    out
}

/// Competition ranks (1 = best) for single-player attempts on one instance.
pub fn solo_ranks(results: &[SoloResult]) -> Vec<usize> {
    (0..results.len())
        .map(|i| {
            1 + (0..results.len())
                .filter(|&j| compare_solo(&results[j], &results[i]) == PairOutcome::AWins)
                .count()
        })
        .collect()
}
