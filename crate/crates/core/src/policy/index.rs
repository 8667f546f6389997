//! Upper-confidence index formulas.
//!
//! Every function returns `f64::INFINITY` for an arm that has never been
//! pulled; the caller treats that as "must select". Logarithms are natural
//! and variances are population variances (divide by N).

use crate::error::{Error, Result};
use crate::numerics::inverse_normal_cdf;

use super::config::{NigPrior, PolicyConfig};
use super::state::ArmState;

/// Sentinel index for an arm that still needs its forced initial pull.
pub const FORCED_PULL: f64 = f64::INFINITY;

/// Floor applied to the NIG scale parameter after cancellation.
pub const BETA_FLOOR: f64 = 1e-12;

/// Cap on the UCB-Tuned variance estimate.
pub const TUNED_VARIANCE_CAP: f64 = 0.25;

#[inline]
fn ln_t(t: u64) -> f64 {
    (t as f64).ln()
}

/// `mean + sqrt(2 ln t / N)`
pub fn ucb1_index(state: &ArmState, t: u64) -> f64 {
    if state.pulls() == 0 {
        return FORCED_PULL;
    }
    let n = state.pulls() as f64;
    state.mean() + (2.0 * ln_t(t) / n).sqrt()
}

/// `mean + sqrt(2 var ln t / N) + 3 B ln t / N`
pub fn ucbv_index(state: &ArmState, t: u64, reward_range: f64) -> f64 {
    if state.pulls() == 0 {
        return FORCED_PULL;
    }
    ucbv_at_log(state, ln_t(t), reward_range)
}

/// UCB-V evaluated at a given `ln t`, for pulled arms.
pub fn ucbv_at_log(state: &ArmState, lt: f64, reward_range: f64) -> f64 {
    let n = state.pulls() as f64;
    state.mean() + (2.0 * state.variance() * lt / n).sqrt() + 3.0 * reward_range * lt / n
}

/// Capped variance `min(V + sqrt(2 ln t / N), 0.25)` used by UCB-Tuned.
pub fn tuned_variance(state: &ArmState, t: u64) -> f64 {
    let n = state.pulls() as f64;
    (state.variance() + (2.0 * ln_t(t) / n).sqrt()).min(TUNED_VARIANCE_CAP)
}

/// `mean + sqrt((ln t / N) * V_tilde)`
pub fn ucb_tuned_index(state: &ArmState, t: u64) -> f64 {
    if state.pulls() == 0 {
        return FORCED_PULL;
    }
    let n = state.pulls() as f64;
    state.mean() + (ln_t(t) / n * tuned_variance(state, t)).sqrt()
}

/// Normal-Inverse-Gamma posterior of one arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigPosterior {
    pub lambda: f64,
    pub mu: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Standard deviation of the posterior mean.
    pub sigma: f64,
    /// Set when `beta` was floored at [`BETA_FLOOR`].
    pub beta_clamped: bool,
}

/// Conjugate update from the arm's sufficient statistics.
pub fn nig_posterior(state: &ArmState, prior: &NigPrior) -> NigPosterior {
    let n = state.pulls() as f64;
    let lambda = prior.lambda0 + n;
    let mu = (prior.lambda0 * prior.mu0 + state.reward_sum()) / lambda;
    let alpha = prior.alpha0 + n / 2.0;
    let mut beta = prior.beta0
        + 0.5 * (state.reward_sq_sum() + prior.lambda0 * prior.mu0 * prior.mu0 - lambda * mu * mu);
    let beta_clamped = beta.is_nan() || beta <= 0.0;
    if beta_clamped {
        log::warn!("NIG scale parameter {beta} not positive after cancellation; floored");
        beta = BETA_FLOOR;
    }
    let sigma = (beta / ((alpha - 1.0) * lambda)).sqrt();
    NigPosterior {
        lambda,
        mu,
        alpha,
        beta,
        sigma,
        beta_clamped,
    }
}

/// Quantile schedule: 0.95 for t < 3, else `1 - 1/(t (ln t)^alpha)`.
pub fn bayes_quantile(t: u64, exponent: f64) -> f64 {
    if t < 3 {
        return 0.95;
    }
    let tf = t as f64;
    1.0 - 1.0 / (tf * tf.ln().powf(exponent))
}

/// `z_t = Φ⁻¹(q_t)`, shared by every arm at step t.
pub fn bayes_z(t: u64, exponent: f64) -> Result<f64> {
    inverse_normal_cdf(bayes_quantile(t, exponent))
}

/// `mu_i + z_t sigma_i` for a precomputed `z_t`.
pub fn ucb_bayes_index_with_z(state: &ArmState, prior: &NigPrior, z: f64) -> f64 {
    if state.pulls() == 0 {
        return FORCED_PULL;
    }
    let post = nig_posterior(state, prior);
    post.mu + z * post.sigma
}

pub fn ucb_bayes_index(state: &ArmState, t: u64, config: &PolicyConfig) -> Result<f64> {
    if state.pulls() == 0 {
        return Ok(FORCED_PULL);
    }
    let z = bayes_z(t, config.quantile_exponent)?;
    Ok(ucb_bayes_index_with_z(state, &config.prior, z))
}

/// Parts of the cost-aware ratio index, exposed for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BwkBounds {
    pub confidence: f64,
    pub reward_ucb: f64,
    pub tau: f64,
    pub cost_lcb: f64,
}

pub fn bwk_bounds(state: &ArmState, t: u64) -> BwkBounds {
    let n = state.pulls() as f64;
    let lt = ln_t(t);
    let confidence = (2.0 * lt / n).sqrt();
    let tau = (lt / t as f64).sqrt();
    BwkBounds {
        confidence,
        reward_ucb: state.mean() + confidence,
        tau,
        cost_lcb: (state.mean_cost() - confidence).max(tau),
    }
}

/// `UCB^r / max(mean_cost - conf, tau_t)`
pub fn ucb_bwk_index(state: &ArmState, t: u64) -> Result<f64> {
    if state.pulls() == 0 {
        return Ok(FORCED_PULL);
    }
    let b = bwk_bounds(state, t);
    if b.cost_lcb.is_nan() || b.cost_lcb <= 0.0 {
        return Err(Error::Domain(format!(
            "cost lower bound is {} at t = {t}; the ratio index needs t >= 2",
            b.cost_lcb
        )));
    }
    Ok(b.reward_ucb / b.cost_lcb)
}
