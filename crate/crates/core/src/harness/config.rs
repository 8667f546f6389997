//! TOML experiment configuration.
//!
//! ```toml
//! horizon = 10000
//! seeds = [1, 2, 3]
//! epsilon = 0.01            # optional, default 0.01
//! oracle_samples = 100000   # optional, default 100000
//! output_dir = "results"    # relative to the config file
//!
//! [environment]
//! trace = "trace.jsonl"     # optional; replay instead of synthesize
//!
//! [environment.profile]     # optional; defaults to the desk-scale profile
//! confidence_gain = [0.60, 0.80, 0.90, 0.97]
//! accuracy = [0.70, 0.85, 0.92, 0.95]
//! confidence_noise_sd = 0.05
//! gating_noise_sd = 0.05
//! latency_ms = [1.0, 2.0, 3.5, 5.0]
//! energy_units = [1.0, 2.2, 3.8, 6.0]
//!
//! [[arm_sets]]
//! name = "coarse"
//! thresholds = [0.5, 0.6, 0.7, 0.8, 0.9]
//!
//! [[policies]]
//! kind = "ucb-bayes"        # ucb1 | ucb-v | ucb-tuned | ucb-bayes | ucb-bwk
//! name = "bayes"            # optional, defaults to kind
//! reward_range = 1.0        # UCB-V
//! quantile_exponent = 1.0   # UCB-Bayes
//! prior = { mu0 = 0.5, lambda0 = 1.0, alpha0 = 2.0, beta0 = 0.1 }
//! ```

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::env::{load_trace, Environment, ExitProfile};
use crate::error::{Error, Result};
use crate::policy::{ArmSet, NigPrior, PolicyConfig, PolicyKind};

pub const DEFAULT_EPSILON: f64 = 0.01;
pub const DEFAULT_ORACLE_SAMPLES: usize = 100_000;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    horizon: usize,
    seeds: Vec<u64>,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(default)]
    oracle_samples: Option<usize>,
    output_dir: PathBuf,
    #[serde(default)]
    environment: RawEnvironment,
    arm_sets: Vec<RawArmSet>,
    policies: Vec<RawPolicy>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvironment {
    trace: Option<PathBuf>,
    profile: Option<ExitProfile>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArmSet {
    name: String,
    thresholds: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolicy {
    kind: PolicyKind,
    name: Option<String>,
    reward_range: Option<f64>,
    quantile_exponent: Option<f64>,
    prior: Option<RawPrior>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPrior {
    mu0: f64,
    lambda0: f64,
    alpha0: f64,
    beta0: f64,
}

#[derive(Debug, Clone)]
pub struct NamedArmSet {
    pub name: String,
    pub arms: ArmSet,
}

#[derive(Debug, Clone)]
pub struct NamedPolicy {
    pub name: String,
    pub config: PolicyConfig,
}

#[derive(Debug, Clone)]
pub struct EnvironmentSpec {
    pub profile: ExitProfile,
    /// Trace to replay, already resolved against the config directory.
    pub trace: Option<PathBuf>,
}

impl EnvironmentSpec {
    /// Loads the trace (if any) and builds the environment.
    pub fn build(&self) -> Result<Environment> {
        match &self.trace {
            None => Environment::synthetic(self.profile.clone()),
            Some(path) => Environment::replay(load_trace(path)?, self.profile.costs()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub arm_sets: Vec<NamedArmSet>,
    pub policies: Vec<NamedPolicy>,
    pub environment: EnvironmentSpec,
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub epsilon: f64,
    pub oracle_samples: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        Self::from_toml_str(&text, base).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    /// Parses and validates; relative paths resolve against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: PathBuf::from("<config>"),
            message: e.to_string(),
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };

        let arm_sets = raw
            .arm_sets
            .into_iter()
            .map(|a| {
                let arms = ArmSet::new(&a.thresholds)
                    .map_err(|e| Error::Config(format!("arm set `{}`: {e}", a.name)))?;
                Ok(NamedArmSet { name: a.name, arms })
            })
            .collect::<Result<Vec<_>>>()?;

        let policies = raw
            .policies
            .into_iter()
            .map(|p| {
                let mut config = PolicyConfig::new(p.kind);
                if let Some(b) = p.reward_range {
                    config.reward_range = b;
                }
                if let Some(a) = p.quantile_exponent {
                    config.quantile_exponent = a;
                }
                if let Some(prior) = p.prior {
                    config.prior = NigPrior {
                        mu0: prior.mu0,
                        lambda0: prior.lambda0,
                        alpha0: prior.alpha0,
                        beta0: prior.beta0,
                    };
                }
                config.validate()?;
                Ok(NamedPolicy {
                    name: p.name.unwrap_or_else(|| p.kind.as_str().to_string()),
                    config,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let config = ExperimentConfig {
            arm_sets,
            policies,
            environment: EnvironmentSpec {
                profile: raw.environment.profile.unwrap_or_default(),
                trace: raw.environment.trace.map(resolve),
            },
            horizon: raw.horizon,
            seeds: raw.seeds,
            epsilon: raw.epsilon.unwrap_or(DEFAULT_EPSILON),
            oracle_samples: raw.oracle_samples.unwrap_or(DEFAULT_ORACLE_SAMPLES),
            output_dir: resolve(raw.output_dir),
        };
        config.validate()?;
        Ok(config)
    }

    /// Checks everything that does not require reading the trace.
    pub fn validate(&self) -> Result<()> {
        if self.arm_sets.is_empty() {
            return Err(Error::Config("at least one arm set is required".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config("at least one policy is required".into()));
        }
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        check_unique("seed", self.seeds.iter().map(u64::to_string))?;
        check_unique("arm set", self.arm_sets.iter().map(|a| a.name.clone()))?;
        check_unique("policy", self.policies.iter().map(|p| p.name.clone()))?;
        for name in self
            .arm_sets
            .iter()
            .map(|a| &a.name)
            .chain(self.policies.iter().map(|p| &p.name))
        {
            check_name(name)?;
        }
        for p in &self.policies {
            p.config.validate()?;
        }
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        for a in &self.arm_sets {
            if self.horizon < a.arms.len() {
                return Err(Error::Config(format!(
                    "horizon {} is shorter than arm set `{}` ({} arms need a forced pull each)",
                    self.horizon,
                    a.name,
                    a.arms.len()
                )));
            }
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::Config(format!(
                "epsilon {} must be >= 0",
                self.epsilon
            )));
        }
        if self.oracle_samples == 0 {
            return Err(Error::Config("oracle_samples must be positive".into()));
        }
        self.environment.profile.validate()
    }

    /// Full check including the trace file, as run before any episode.
    pub fn validate_with_environment(&self) -> Result<Environment> {
        self.validate()?;
        let env = self.environment.build()?;
        if let Some(len) = env.trace_len() {
            if len < self.horizon {
                return Err(Error::TraceTooShort {
                    available: len,
                    needed: self.horizon,
                });
            }
        }
        Ok(env)
    }

    pub fn with_seed_offset(mut self, offset: u64) -> Self {
        for s in &mut self.seeds {
            *s = s.wrapping_add(offset);
        }
        self
    }

    pub fn num_episodes(&self) -> usize {
        self.policies.len() * self.arm_sets.len() * self.seeds.len()
    }
}

fn check_unique(what: &str, names: impl Iterator<Item = String>) -> Result<()> {
    let mut seen = HashSet::new();
    for n in names {
        if !seen.insert(n.clone()) {
            return Err(Error::Config(format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

/// Names end up in file names.
fn check_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && !name.contains("__")
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
        && !name.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "name `{name}` must use only [A-Za-z0-9._-], not start with '.', and not contain `__`"
        )))
    }
}
