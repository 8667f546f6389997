use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::analytics::{
    aggregate, cumulative_regret, pareto_indices, sublinearity_check, ParetoObjective,
    TradeoffPoint,
};
use crate::env::{arm_reward_means, lambda_from_epsilon, ArmRewardMeans, Environment, TraceRecord};
use crate::error::{Error, Result};
use crate::numerics::{derive_stream_id, RngStream};
use crate::policy::Policy;

use super::config::ExperimentConfig;
use super::episode::run_episode;
use super::format::format_real;

pub const SAMPLES_PURPOSE: &str = "samples";
pub const ORACLE_PURPOSE: &str = "oracle";

/// Stream feeding the inputs of one episode.
pub fn sample_stream(policy: &str, arm_set: &str, seed: u64) -> RngStream {
    RngStream::new(
        seed,
        derive_stream_id(policy, arm_set, seed, SAMPLES_PURPOSE),
    )
}

/// Stream for the arm-mean pre-pass. Shared by every policy on the same arm
/// set and seed, so all of them are measured against the same baseline.
pub fn oracle_stream(arm_set: &str, seed: u64) -> RngStream {
    RngStream::new(seed, derive_stream_id("", arm_set, seed, ORACLE_PURPOSE))
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub policy: String,
    pub arm_set: String,
    pub seed: u64,
    pub arms: Vec<usize>,
    pub rewards: Vec<f64>,
    pub cumulative_regret: Vec<f64>,
    pub tradeoff: TradeoffPoint,
}

impl EpisodeResult {
    /// Mean per-step regret over steps `from..=to` (1-based, inclusive).
    pub fn mean_regret_increment(&self, from: usize, to: usize) -> f64 {
        assert!(from >= 1 && from <= to && to <= self.cumulative_regret.len());
        let before = if from == 1 {
            0.0
        } else {
            self.cumulative_regret[from - 2]
        };
        (self.cumulative_regret[to - 1] - before) / (to - from + 1) as f64
    }
}

/// Seed-averaged trade-off for one (policy, arm set) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub policy: String,
    pub arm_set: String,
    pub point: TradeoffPoint,
    pub pareto_latency: bool,
    pub pareto_energy: bool,
}

#[derive(Debug, Clone)]
pub struct GridResult {
    pub horizon: usize,
    /// In grid order: policy, then arm set, then seed, as listed in the config.
    pub episodes: Vec<EpisodeResult>,
    pub tradeoffs: Vec<TradeoffRow>,
}

impl GridResult {
    pub fn episodes_for<'a>(
        &'a self,
        policy: &'a str,
        arm_set: &'a str,
    ) -> impl Iterator<Item = &'a EpisodeResult> + 'a {
        self.episodes
            .iter()
            .filter(move |e| e.policy == policy && e.arm_set == arm_set)
    }

    /// Mean and population sd of the cumulative regret across seeds, per step.
    pub fn mean_regret_curve(&self, policy: &str, arm_set: &str) -> (Vec<f64>, Vec<f64>) {
        let runs: Vec<&EpisodeResult> = self.episodes_for(policy, arm_set).collect();
        let n = runs.len() as f64;
        let mut mean = vec![0.0; self.horizon];
        let mut sd = vec![0.0; self.horizon];
        for t in 0..self.horizon {
            let m = runs.iter().map(|r| r.cumulative_regret[t]).sum::<f64>() / n;
            let v = runs
                .iter()
                .map(|r| (r.cumulative_regret[t] - m).powi(2))
                .sum::<f64>()
                / n;
            mean[t] = m;
            sd[t] = v.sqrt();
        }
        (mean, sd)
    }
}

/// Runs every (policy, arm set, seed) episode of the grid.
///
/// Configuration problems surface before any episode starts. Episodes run in
/// parallel; results are returned in grid order.
pub fn run_grid(config: &ExperimentConfig) -> Result<GridResult> {
    let env = config.validate_with_environment()?;
    let lambda = lambda_from_epsilon(config.epsilon, env.num_exits());

    let oracle_jobs: Vec<(usize, u64)> = (0..config.arm_sets.len())
        .flat_map(|a| config.seeds.iter().map(move |&s| (a, s)))
        .collect();
    let oracles: HashMap<(usize, u64), ArmRewardMeans> = oracle_jobs
        .par_iter()
        .map(|&(a, seed)| {
            let set = &config.arm_sets[a];
            let mut rng = oracle_stream(&set.name, seed);
            arm_reward_means(&env, &set.arms, lambda, config.oracle_samples, &mut rng)
                .map(|m| ((a, seed), m))
        })
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize, u64)> = (0..config.policies.len())
        .flat_map(|p| {
            (0..config.arm_sets.len())
                .flat_map(move |a| config.seeds.iter().map(move |&s| (p, a, s)))
        })
        .collect();
    log::info!(
        "running {} episodes of {} steps",
        jobs.len(),
        config.horizon
    );
    let episodes = jobs
        .par_iter()
        .map(|&(p, a, seed)| {
            let named = &config.policies[p];
            let set = &config.arm_sets[a];
            let means = oracles[&(a, seed)].for_kind(named.config.kind);
            let mut policy = Policy::new(named.config, set.arms.len())?;
            let rng = sample_stream(&named.name, &set.name, seed);
            let logs = run_episode(
                &mut policy,
                &env,
                &set.arms,
                config.horizon,
                lambda,
                means,
                rng,
            )?;
            log::debug!("{} / {} / seed {seed} done", named.name, set.name);
            Ok(EpisodeResult {
                policy: named.name.clone(),
                arm_set: set.name.clone(),
                seed,
                arms: logs.iter().map(|l| l.arm).collect(),
                rewards: logs.iter().map(|l| l.reward).collect(),
                cumulative_regret: cumulative_regret(&logs),
                tradeoff: aggregate(&logs, format!("{}/{}", named.name, set.name))?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::new();
    let mut keys = Vec::new();
    for p in &config.policies {
        for a in &config.arm_sets {
            let runs: Vec<&TradeoffPoint> = episodes
                .iter()
                .filter(|e| e.policy == p.name && e.arm_set == a.name)
                .map(|e| &e.tradeoff)
                .collect();
            let n = runs.len() as f64;
            points.push(TradeoffPoint {
                label: format!("{}/{}", p.name, a.name),
                accuracy: runs.iter().map(|r| r.accuracy).sum::<f64>() / n,
                mean_latency_ms: runs.iter().map(|r| r.mean_latency_ms).sum::<f64>() / n,
                mean_energy_units: runs.iter().map(|r| r.mean_energy_units).sum::<f64>() / n,
            });
            keys.push((p.name.clone(), a.name.clone()));
        }
    }
    let on_latency = membership(&points, ParetoObjective::AccuracyVsLatency);
    let on_energy = membership(&points, ParetoObjective::AccuracyVsEnergy);
    let tradeoffs = keys
        .into_iter()
        .zip(points)
        .enumerate()
        .map(|(i, ((policy, arm_set), point))| TradeoffRow {
            policy,
            arm_set,
            point,
            pareto_latency: on_latency[i],
            pareto_energy: on_energy[i],
        })
        .collect();

    Ok(GridResult {
        horizon: config.horizon,
        episodes,
        tradeoffs,
    })
}

fn membership(points: &[TradeoffPoint], objective: ParetoObjective) -> Vec<bool> {
    let mut flags = vec![false; points.len()];
    for i in pareto_indices(points, objective) {
        flags[i] = true;
    }
    flags
}

/// Which files [`write_outputs`] produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutputSelection {
    pub regret: bool,
    pub tradeoff: bool,
}

impl OutputSelection {
    pub const ALL: Self = Self {
        regret: true,
        tradeoff: true,
    };
}

/// Writes the CSV files under `dir` and returns their paths.
///
/// Layout:
/// - `regret/<policy>__<arm_set>__seed<seed>.csv`: `t,arm,reward,cumulative_regret`
/// - `regret_mean/<policy>__<arm_set>.csv`: `t,mean_cumulative_regret,sd_cumulative_regret`
/// - `regret_summary.csv`: `policy,arm_set,seed,cumulative_regret,decade_ratio,sublinear`
/// - `tradeoff.csv`: `policy,arm_set,accuracy,mean_latency_ms,mean_energy_units,pareto_latency,pareto_energy`
///
/// The sub-linearity columns are empty when the horizon is below 1000.
pub fn write_outputs(
    result: &GridResult,
    dir: &Path,
    selection: OutputSelection,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if selection.regret {
        let per_run = dir.join("regret");
        let mean_dir = dir.join("regret_mean");
        create_dir(&per_run)?;
        create_dir(&mean_dir)?;
        for e in &result.episodes {
            let mut out = String::from("t,arm,reward,cumulative_regret\n");
            for i in 0..e.arms.len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    i + 1,
                    e.arms[i],
                    format_real(e.rewards[i]),
                    format_real(e.cumulative_regret[i])
                ));
            }
            let path = per_run.join(format!("{}__{}__seed{}.csv", e.policy, e.arm_set, e.seed));
            write_file(&path, &out)?;
            written.push(path);
        }
        for row in &result.tradeoffs {
            let (mean, sd) = result.mean_regret_curve(&row.policy, &row.arm_set);
            let mut out = String::from("t,mean_cumulative_regret,sd_cumulative_regret\n");
            for t in 0..mean.len() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    t + 1,
                    format_real(mean[t]),
                    format_real(sd[t])
                ));
            }
            let path = mean_dir.join(format!("{}__{}.csv", row.policy, row.arm_set));
            write_file(&path, &out)?;
            written.push(path);
        }
        let mut out =
            String::from("policy,arm_set,seed,cumulative_regret,decade_ratio,sublinear\n");
        for e in &result.episodes {
            let final_regret = e.cumulative_regret.last().copied().unwrap_or(0.0);
            let (ratio, passed) = match sublinearity_check(&e.cumulative_regret, result.horizon) {
                Ok(r) => (format_real(r.decade_ratio()), (r.passed as u8).to_string()),
                Err(_) => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{ratio},{passed}\n",
                e.policy,
                e.arm_set,
                e.seed,
                format_real(final_regret)
            ));
        }
        let path = dir.join("regret_summary.csv");
        write_file(&path, &out)?;
        written.push(path);
    }
    if selection.tradeoff {
        create_dir(dir)?;
        let mut out = String::from(
            "policy,arm_set,accuracy,mean_latency_ms,mean_energy_units,pareto_latency,pareto_energy\n",
        );
        for row in &result.tradeoffs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.policy,
                row.arm_set,
                format_real(row.point.accuracy),
                format_real(row.point.mean_latency_ms),
                format_real(row.point.mean_energy_units),
                row.pareto_latency as u8,
                row.pareto_energy as u8
            ));
        }
        let path = dir.join("tradeoff.csv");
        write_file(&path, &out)?;
        written.push(path);
    }
    Ok(written)
}

/// Synthetic inputs exactly as the first (policy, arm set, seed) episode of
/// the grid would see them, ready to be written as a trace.
pub fn generate_trace(config: &ExperimentConfig) -> Result<Vec<TraceRecord>> {
    config.validate()?;
    let env = Environment::synthetic(config.environment.profile.clone())?;
    let (policy, arm_set, seed) = (
        &config.policies[0].name,
        &config.arm_sets[0].name,
        config.seeds[0],
    );
    let mut sampler = env.sampler(sample_stream(policy, arm_set, seed));
    (0..config.horizon as u64)
        .map(|sample_id| {
            Ok(TraceRecord {
                sample_id,
                sample: sampler.next_sample()?.into_owned(),
            })
        })
        .collect()
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| Error::io(path, e))
}
