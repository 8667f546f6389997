/// Running statistics for one arm.
///
/// `mean_cost` is maintained only by the cost-aware policy, through the
/// incremental-mean recurrence `m += (c - m) / N`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ArmState {
    pulls: u64,
    reward_sum: f64,
    reward_sq_sum: f64,
    mean_cost: f64,
}

impl ArmState {
    /// Builds a state directly from its sufficient statistics.
    pub fn from_sums(pulls: u64, reward_sum: f64, reward_sq_sum: f64, mean_cost: f64) -> Self {
        Self {
            pulls,
            reward_sum,
            reward_sq_sum,
            mean_cost,
        }
    }

    /// A state with the given empirical mean and population variance.
    pub fn from_moments(pulls: u64, mean: f64, variance: f64) -> Self {
        let n = pulls as f64;
        Self::from_sums(pulls, mean * n, (variance + mean * mean) * n, 0.0)
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn reward_sum(&self) -> f64 {
        self.reward_sum
    }

    pub fn reward_sq_sum(&self) -> f64 {
        self.reward_sq_sum
    }

    pub fn mean_cost(&self) -> f64 {
        self.mean_cost
    }

    /// Empirical mean reward; 0 before the first pull.
    pub fn mean(&self) -> f64 {
        if self.pulls == 0 {
            0.0
        } else {
            self.reward_sum / self.pulls as f64
        }
    }

    /// Population variance `S2/N - mean^2`, clamped at 0.
    pub fn variance(&self) -> f64 {
        if self.pulls == 0 {
            return 0.0;
        }
        let m = self.mean();
        (self.reward_sq_sum / self.pulls as f64 - m * m).max(0.0)
    }

    pub(crate) fn record_reward(&mut self, reward: f64) {
        self.pulls += 1;
        self.reward_sum += reward;
        self.reward_sq_sum += reward * reward;
    }

    pub(crate) fn record_cost(&mut self, cost: f64) {
        debug_assert!(self.pulls > 0);
        self.mean_cost += (cost - self.mean_cost) / self.pulls as f64;
    }
}
