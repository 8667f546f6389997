use crate::analytics::StepLog;
use crate::env::{compute_reward, Environment};
use crate::error::{Error, Result};
use crate::numerics::RngStream;
use crate::policy::{ArmSet, Policy};

/// Runs the online loop for `horizon` steps.
///
/// Each step selects an arm, draws the next input (or trace record), resolves
/// the exit under the arm's threshold, feeds the reward and normalized cost
/// back to the policy, and logs the pseudo-regret against `arm_means`.
pub fn run_episode(
    policy: &mut Policy,
    env: &Environment,
    arms: &ArmSet,
    horizon: usize,
    lambda: f64,
    arm_means: &[f64],
    rng: RngStream,
) -> Result<Vec<StepLog>> {
    let k = arms.len();
    if policy.num_arms() != k {
        return Err(Error::Config(format!(
            "policy has {} arms but the arm set has {k}",
            policy.num_arms()
        )));
    }
    if arm_means.len() != k {
        return Err(Error::Config(format!(
            "{} arm means supplied for {k} arms",
            arm_means.len()
        )));
    }
    if horizon < k {
        return Err(Error::Config(format!(
            "horizon {horizon} is shorter than the {k} forced initial pulls"
        )));
    }
    if let Some(len) = env.trace_len() {
        if len < horizon {
            return Err(Error::TraceTooShort {
                available: len,
                needed: horizon,
            });
        }
    }
    let best = arm_means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let kind = policy.kind();
    let mut sampler = env.sampler(rng);
    let mut logs = Vec::with_capacity(horizon);
    for t in 1..=horizon as u64 {
        let arm = policy.select_arm(t)?;
        let sample = sampler.next_sample()?;
        let theta = arms.get(arm).expect("policy arm within arm set").theta;
        let outcome = env.resolve(&sample, theta);
        let signal = compute_reward(&outcome, lambda, kind);
        policy.update_arm(arm, signal.reward, signal.cost)?;
        logs.push(StepLog {
            t,
            arm,
            reward: signal.reward,
            normalized_cost: signal.cost,
            exit_index: outcome.exit_index,
            correct: outcome.correct,
            latency_ms: outcome.latency_ms,
            energy_units: outcome.energy_units,
            regret_increment: best - arm_means[arm],
        });
    }
    Ok(logs)
}
