//! The five UCB index strategies as online policies over a fixed arm set.
//!
//! A [`Policy`] alternates [`Policy::select_arm`] and [`Policy::update_arm`].
//! Until every arm has been pulled once, selection returns the lowest-index
//! unpulled arm; afterwards it returns the argmax of the policy's index with
//! ties going to the lowest arm index.

mod arm;
mod config;
pub mod index;
mod state;

pub use arm::{ArmSet, ThresholdArm};
pub use config::{NigPrior, PolicyConfig, PolicyKind};
pub use index::{
    bayes_quantile, nig_posterior, ucb1_index, ucb_bayes_index, ucb_bwk_index, ucb_tuned_index,
    ucbv_index, NigPosterior,
};
pub use state::ArmState;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Policy {
    config: PolicyConfig,
    arms: Vec<ArmState>,
}

impl Policy {
    pub fn new(config: PolicyConfig, num_arms: usize) -> Result<Self> {
        if num_arms == 0 {
            return Err(Error::Config("a policy needs at least one arm".into()));
        }
        config.validate()?;
        Ok(Self {
            config,
            arms: vec![ArmState::default(); num_arms],
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn kind(&self) -> PolicyKind {
        self.config.kind
    }

    pub fn arms(&self) -> &[ArmState] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn total_pulls(&self) -> u64 {
        self.arms.iter().map(ArmState::pulls).sum()
    }

    /// The policy's index for one arm at step `t`.
    pub fn index(&self, arm: usize, t: u64) -> Result<f64> {
        let state = self
            .arms
            .get(arm)
            .ok_or_else(|| Error::Contract(format!("arm {arm} out of range")))?;
        match self.config.kind {
            PolicyKind::UcbBayes => ucb_bayes_index(state, t, &self.config),
            _ => self.index_with_z(state, t, 0.0),
        }
    }

    fn index_with_z(&self, state: &ArmState, t: u64, z: f64) -> Result<f64> {
        Ok(match self.config.kind {
            PolicyKind::Ucb1 => ucb1_index(state, t),
            PolicyKind::UcbV => ucbv_index(state, t, self.config.reward_range),
            PolicyKind::UcbTuned => ucb_tuned_index(state, t),
            PolicyKind::UcbBayes => index::ucb_bayes_index_with_z(state, &self.config.prior, z),
            PolicyKind::UcbBwk => ucb_bwk_index(state, t)?,
        })
    }

    pub fn select_arm(&self, t: u64) -> Result<usize> {
        if t == 0 {
            return Err(Error::Contract("time steps start at 1".into()));
        }
        // Lowest-index unpulled arm; for the cost-aware policy this is argmin N.
        if let Some(arm) = self.arms.iter().position(|s| s.pulls() == 0) {
            return Ok(arm);
        }
        let z = match self.config.kind {
            PolicyKind::UcbBayes => index::bayes_z(t, self.config.quantile_exponent)?,
            _ => 0.0,
        };
        let mut best = 0;
        let mut best_value = f64::NEG_INFINITY;
        for (i, state) in self.arms.iter().enumerate() {
            let value = self.index_with_z(state, t, z)?;
            if value > best_value {
                best = i;
                best_value = value;
            }
        }
        Ok(best)
    }

    /// Records the observed reward (and cost, for the cost-aware policy).
    ///
    /// Rewards must lie in [0, 1]; other policies ignore `cost`.
    pub fn update_arm(&mut self, arm: usize, reward: f64, cost: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&reward) {
            return Err(Error::Contract(format!("reward {reward} outside [0, 1]")));
        }
        let cost_aware = self.config.kind.is_cost_aware();
        if cost_aware && !cost.is_finite() {
            return Err(Error::Contract(format!("cost {cost} is not finite")));
        }
        let num_arms = self.arms.len();
        let state = self
            .arms
            .get_mut(arm)
            .ok_or_else(|| Error::Contract(format!("arm {arm} out of range (K = {num_arms})")))?;
        state.record_reward(reward);
        if cost_aware {
            state.record_cost(cost);
        }
        Ok(())
    }
}
