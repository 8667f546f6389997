use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five index strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    Ucb1,
    UcbV,
    UcbTuned,
    UcbBayes,
    UcbBwk,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 5] = [
        PolicyKind::Ucb1,
        PolicyKind::UcbV,
        PolicyKind::UcbTuned,
        PolicyKind::UcbBayes,
        PolicyKind::UcbBwk,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::UcbV => "ucb-v",
            PolicyKind::UcbTuned => "ucb-tuned",
            PolicyKind::UcbBayes => "ucb-bayes",
            PolicyKind::UcbBwk => "ucb-bwk",
        }
    }

    /// Whether the policy tracks costs separately from rewards.
    pub fn is_cost_aware(self) -> bool {
        self == PolicyKind::UcbBwk
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown policy kind `{s}`")))
    }
}

/// Normal-Inverse-Gamma prior hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NigPrior {
    pub mu0: f64,
    pub lambda0: f64,
    pub alpha0: f64,
    pub beta0: f64,
}

impl Default for NigPrior {
    fn default() -> Self {
        Self {
            mu0: 0.5,
            lambda0: 1.0,
            alpha0: 2.0,
            beta0: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Reward range constant of the UCB-V bonus.
    pub reward_range: f64,
    pub prior: NigPrior,
    /// Growth exponent of the UCB-Bayes quantile schedule.
    pub quantile_exponent: f64,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind) -> Self {
        Self {
            kind,
            reward_range: 1.0,
            prior: NigPrior::default(),
            quantile_exponent: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let NigPrior {
            mu0,
            lambda0,
            alpha0,
            beta0,
        } = self.prior;
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(format!("{}: {what}", self.kind)))
            }
        };
        check(
            self.reward_range.is_finite() && self.reward_range > 0.0,
            "reward range B must be > 0",
        )?;
        check(mu0.is_finite(), "prior mu0 must be finite")?;
        check(
            lambda0.is_finite() && lambda0 > 0.0,
            "prior lambda0 must be > 0",
        )?;
        check(
            alpha0.is_finite() && alpha0 > 1.0,
            "prior alpha0 must be > 1",
        )?;
        check(beta0.is_finite() && beta0 > 0.0, "prior beta0 must be > 0")?;
        check(
            self.quantile_exponent.is_finite() && self.quantile_exponent > 0.0,
            "quantile exponent must be > 0",
        )
    }
}
