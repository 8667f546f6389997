use crate::numerics::{sample_gaussian, RngStream};
use crate::policy::PolicyKind;

use super::profile::{ExitCosts, ExitProfile};

/// Per-exit observations for one input, as the early-exit network would see it.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub confidence: Vec<f64>,
    pub correct: Vec<bool>,
    pub gating: Vec<f64>,
    /// Overrides the environment's per-exit costs for this sample only.
    pub costs: Option<ExitCosts>,
}

impl Sample {
    pub fn num_exits(&self) -> usize {
        self.confidence.len()
    }
}

/// A synthetic sample together with its latent difficulty.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSample {
    pub difficulty: f64,
    pub sample: Sample,
}

/// Draws one synthetic input.
///
/// Consumption order per call: difficulty, then for each exit the confidence
/// noise, the correctness uniform and the gating noise. That is `1 + 3L`
/// draws regardless of the noise settings.
pub fn synth_sample(profile: &ExitProfile, rng: &mut RngStream) -> LatentSample {
    let difficulty = rng.next_unit();
    LatentSample {
        difficulty,
        sample: synth_sample_at(profile, difficulty, rng),
    }
}

/// The per-exit part of [`synth_sample`] for a given difficulty (3L draws).
pub fn synth_sample_at(profile: &ExitProfile, difficulty: f64, rng: &mut RngStream) -> Sample {
    let l = profile.num_exits();
    let mut sample = Sample {
        confidence: Vec::with_capacity(l),
        correct: Vec::with_capacity(l),
        gating: Vec::with_capacity(l),
        costs: None,
    };
    for (&gain, &acc) in profile.confidence_gain.iter().zip(&profile.accuracy) {
        let raw =
            gain * (1.0 - difficulty) + sample_gaussian(rng, 0.0, profile.confidence_noise_sd);
        let conf = raw.clamp(0.0, 1.0);
        let p_correct = acc * conf;
        let correct = rng.next_unit() < p_correct;
        let gating = ((1.0 - p_correct) + sample_gaussian(rng, 0.0, profile.gating_noise_sd))
            .clamp(0.0, 1.0);
        sample.confidence.push(conf);
        sample.correct.push(correct);
        sample.gating.push(gating);
    }
    sample
}

/// The result of running one input under a threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitOutcome {
    /// 1-based exit position.
    pub exit_index: usize,
    pub num_exits: usize,
    pub confidence: f64,
    pub gating: f64,
    pub correct: bool,
    pub latency_ms: f64,
    pub energy_units: f64,
}

/// First exit whose confidence reaches `theta`; the final exit otherwise.
pub fn resolve_exit(sample: &Sample, theta: f64, default_costs: &ExitCosts) -> ExitOutcome {
    let l = sample.num_exits();
    let pos = sample
        .confidence
        .iter()
        .position(|&c| c >= theta)
        .unwrap_or(l - 1);
    let costs = sample.costs.as_ref().unwrap_or(default_costs);
    ExitOutcome {
        exit_index: pos + 1,
        num_exits: l,
        confidence: sample.confidence[pos],
        gating: sample.gating[pos],
        correct: sample.correct[pos],
        latency_ms: costs.latency_ms[pos],
        energy_units: costs.energy_units[pos],
    }
}

/// Reward fed to a policy and the normalized cost `exit / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardSignal {
    pub reward: f64,
    pub cost: f64,
}

/// `clamp(C (1 - G) - lambda * exit, 0, 1)`.
///
/// The cost-aware policy receives the reward without the exit penalty, since
/// it weighs cost separately.
pub fn compute_reward(outcome: &ExitOutcome, lambda: f64, kind: PolicyKind) -> RewardSignal {
    let base = outcome.confidence * (1.0 - outcome.gating);
    let raw = if kind.is_cost_aware() {
        base
    } else {
        base - lambda * outcome.exit_index as f64
    };
    RewardSignal {
        reward: raw.clamp(0.0, 1.0),
        cost: outcome.exit_index as f64 / outcome.num_exits as f64,
    }
}

/// Risk weight per exit: the error margin spread over the exits.
pub fn lambda_from_epsilon(epsilon: f64, num_exits: usize) -> f64 {
    epsilon / num_exits as f64
}
