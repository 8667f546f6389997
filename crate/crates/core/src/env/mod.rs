//! The early-exit environment: maps (input, threshold) to an exit outcome.
//!
//! Inputs come either from the synthetic generator ([`synth_sample`]) or from
//! a replayed trace. Replay consumes no randomness.

mod profile;
mod sample;
pub mod trace;

use std::borrow::Cow;

pub use profile::{ExitCosts, ExitProfile};
pub use sample::{
    compute_reward, lambda_from_epsilon, resolve_exit, synth_sample, synth_sample_at, ExitOutcome,
    LatentSample, RewardSignal, Sample,
};
pub use trace::{load_trace, read_trace, write_trace, TraceRecord};

use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::policy::{ArmSet, PolicyKind};

#[derive(Debug, Clone)]
enum Source {
    Synthetic(ExitProfile),
    Replay(Vec<TraceRecord>),
}

#[derive(Debug, Clone)]
pub struct Environment {
    source: Source,
    costs: ExitCosts,
    num_exits: usize,
}

impl Environment {
    pub fn synthetic(profile: ExitProfile) -> Result<Self> {
        profile.validate()?;
        Ok(Self {
            costs: profile.costs(),
            num_exits: profile.num_exits(),
            source: Source::Synthetic(profile),
        })
    }

    /// Replays `records` in order. `costs` supplies latency and energy for
    /// records that carry no override.
    pub fn replay(records: Vec<TraceRecord>, costs: ExitCosts) -> Result<Self> {
        let num_exits = records
            .first()
            .map_or(costs.num_exits(), |r| r.sample.num_exits());
        let needs_fallback = records.iter().any(|r| r.sample.costs.is_none());
        if needs_fallback || records.is_empty() {
            costs
                .validate(num_exits, "replay cost table ")
                .map_err(|e| {
                    Error::Config(format!(
                        "trace has {num_exits} exits and some records lack cost overrides: {e}"
                    ))
                })?;
        }
        Ok(Self {
            source: Source::Replay(records),
            costs,
            num_exits,
        })
    }

    pub fn num_exits(&self) -> usize {
        self.num_exits
    }

    pub fn costs(&self) -> &ExitCosts {
        &self.costs
    }

    pub fn is_replay(&self) -> bool {
        matches!(self.source, Source::Replay(_))
    }

    pub fn profile(&self) -> Option<&ExitProfile> {
        match &self.source {
            Source::Synthetic(p) => Some(p),
            Source::Replay(_) => None,
        }
    }

    /// Number of replayable records, `None` for the synthetic generator.
    pub fn trace_len(&self) -> Option<usize> {
        match &self.source {
            Source::Synthetic(_) => None,
            Source::Replay(records) => Some(records.len()),
        }
    }

    pub fn sampler(&self, rng: RngStream) -> Sampler<'_> {
        Sampler {
            env: self,
            rng,
            cursor: 0,
        }
    }

    pub fn resolve(&self, sample: &Sample, theta: f64) -> ExitOutcome {
        resolve_exit(sample, theta, &self.costs)
    }
}

/// Sequential source of inputs for one episode.
pub struct Sampler<'a> {
    env: &'a Environment,
    rng: RngStream,
    cursor: usize,
}

impl<'a> Sampler<'a> {
    pub fn next_sample(&mut self) -> Result<Cow<'a, Sample>> {
        let index = self.cursor;
        self.cursor += 1;
        match &self.env.source {
            Source::Synthetic(profile) => {
                Ok(Cow::Owned(synth_sample(profile, &mut self.rng).sample))
            }
            Source::Replay(records) => {
                records
                    .get(index)
                    .map(|r| Cow::Borrowed(&r.sample))
                    .ok_or(Error::TraceTooShort {
                        available: records.len(),
                        needed: index + 1,
                    })
            }
        }
    }

    pub fn rng(&self) -> &RngStream {
        &self.rng
    }
}

/// Per-arm mean rewards for both reward variants, over common samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmRewardMeans {
    /// Reward with the `lambda * exit` penalty.
    pub penalized: Vec<f64>,
    /// Reward without the penalty, as seen by the cost-aware policy.
    pub unpenalized: Vec<f64>,
}

impl ArmRewardMeans {
    pub fn for_kind(&self, kind: PolicyKind) -> &[f64] {
        if kind.is_cost_aware() {
            &self.unpenalized
        } else {
            &self.penalized
        }
    }
}

/// Estimates every arm's mean reward; the regret baseline.
///
/// All arms are resolved against the same inputs. Synthetic mode draws
/// `n_samples` inputs from `rng`; replay mode averages exactly over the whole
/// trace and leaves `rng` untouched.
pub fn arm_reward_means(
    env: &Environment,
    arms: &ArmSet,
    lambda: f64,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<ArmRewardMeans> {
    let k = arms.len();
    let mut penalized = vec![0.0; k];
    let mut unpenalized = vec![0.0; k];
    let mut count = 0usize;
    let mut accumulate = |sample: &Sample| {
        for arm in arms {
            let outcome = env.resolve(sample, arm.theta);
            penalized[arm.index] += compute_reward(&outcome, lambda, PolicyKind::Ucb1).reward;
            unpenalized[arm.index] += compute_reward(&outcome, lambda, PolicyKind::UcbBwk).reward;
        }
        count += 1;
    };
    match &env.source {
        Source::Synthetic(profile) => {
            if n_samples == 0 {
                return Err(Error::Config("oracle needs at least one sample".into()));
            }
            for _ in 0..n_samples {
                accumulate(&synth_sample(profile, rng).sample);
            }
        }
        Source::Replay(records) => {
            if records.is_empty() {
                return Err(Error::Config(
                    "cannot estimate arm means from an empty trace".into(),
                ));
            }
            for r in records {
                accumulate(&r.sample);
            }
        }
    }
    let n = count as f64;
    penalized.iter_mut().for_each(|v| *v /= n);
    unpenalized.iter_mut().for_each(|v| *v /= n);
    Ok(ArmRewardMeans {
        penalized,
        unpenalized,
    })
}

/// Mean reward per arm for one policy kind's reward variant.
pub fn arm_mean_rewards(
    env: &Environment,
    arms: &ArmSet,
    lambda: f64,
    kind: PolicyKind,
    n_samples: usize,
    rng: &mut RngStream,
) -> Result<Vec<f64>> {
    Ok(arm_reward_means(env, arms, lambda, n_samples, rng)?
        .for_kind(kind)
        .to_vec())
}
