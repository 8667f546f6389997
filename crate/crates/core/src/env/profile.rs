use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-exit latency and energy, indexed by 0-based exit position.
#[derive(Debug, Clone, PartialEq)]
pub struct ExitCosts {
    pub latency_ms: Vec<f64>,
    pub energy_units: Vec<f64>,
}

impl ExitCosts {
    pub fn num_exits(&self) -> usize {
        self.latency_ms.len()
    }

    pub(crate) fn validate(&self, num_exits: usize, what: &str) -> Result<()> {
        check_len(&self.latency_ms, num_exits, &format!("{what}latency_ms"))?;
        check_len(
            &self.energy_units,
            num_exits,
            &format!("{what}energy_units"),
        )?;
        check_increasing_positive(&self.latency_ms, &format!("{what}latency_ms"))?;
        check_increasing_positive(&self.energy_units, &format!("{what}energy_units"))
    }
}

/// Parameters of the synthetic early-exit network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExitProfile {
    /// Base confidence gain per exit, strictly increasing in (0, 1].
    pub confidence_gain: Vec<f64>,
    /// Accuracy ceiling per exit, nondecreasing in [0, 1].
    pub accuracy: Vec<f64>,
    pub confidence_noise_sd: f64,
    pub gating_noise_sd: f64,
    pub latency_ms: Vec<f64>,
    pub energy_units: Vec<f64>,
}

impl Default for ExitProfile {
    /// Four-exit desk-scale profile.
    fn default() -> Self {
        Self {
            confidence_gain: vec![0.60, 0.80, 0.90, 0.97],
            accuracy: vec![0.70, 0.85, 0.92, 0.95],
            confidence_noise_sd: 0.05,
            gating_noise_sd: 0.05,
            latency_ms: vec![1.0, 2.0, 3.5, 5.0],
            energy_units: vec![1.0, 2.2, 3.8, 6.0],
        }
    }
}

impl ExitProfile {
    pub fn num_exits(&self) -> usize {
        self.confidence_gain.len()
    }

    pub fn costs(&self) -> ExitCosts {
        ExitCosts {
            latency_ms: self.latency_ms.clone(),
            energy_units: self.energy_units.clone(),
        }
    }

    /// Same profile with both noise terms switched off.
    pub fn noiseless(mut self) -> Self {
        self.confidence_noise_sd = 0.0;
        self.gating_noise_sd = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let l = self.num_exits();
        if l < 2 {
            return Err(Error::Config(format!(
                "profile needs at least 2 exits, got {l}"
            )));
        }
        check_len(&self.accuracy, l, "accuracy")?;
        for (i, &g) in self.confidence_gain.iter().enumerate() {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::Config(format!(
                    "confidence_gain[{i}] = {g} outside (0, 1]"
                )));
            }
            if i > 0 && g <= self.confidence_gain[i - 1] {
                return Err(Error::Config(
                    "confidence_gain must be strictly increasing".into(),
                ));
            }
        }
        for (i, &a) in self.accuracy.iter().enumerate() {
            if !(0.0..=1.0).contains(&a) {
                return Err(Error::Config(format!("accuracy[{i}] = {a} outside [0, 1]")));
            }
            if i > 0 && a < self.accuracy[i - 1] {
                return Err(Error::Config("accuracy must be nondecreasing".into()));
            }
        }
        for (name, sd) in [
            ("confidence_noise_sd", self.confidence_noise_sd),
            ("gating_noise_sd", self.gating_noise_sd),
        ] {
            if !(sd.is_finite() && sd >= 0.0) {
                return Err(Error::Config(format!(
                    "{name} = {sd} must be finite and >= 0"
                )));
            }
        }
        self.costs().validate(l, "")
    }
}

fn check_len(v: &[f64], l: usize, name: &str) -> Result<()> {
    if v.len() != l {
        return Err(Error::Config(format!(
            "{name} has {} entries, expected {l}",
            v.len()
        )));
    }
    Ok(())
}

fn check_increasing_positive(v: &[f64], name: &str) -> Result<()> {
    for (i, &x) in v.iter().enumerate() {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::Config(format!("{name}[{i}] = {x} must be positive")));
        }
        if i > 0 && x <= v[i - 1] {
            return Err(Error::Config(format!("{name} must be strictly increasing")));
        }
    }
    Ok(())
}
