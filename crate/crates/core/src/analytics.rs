//! Regret curves, accuracy/cost aggregates and Pareto frontiers.

use crate::error::{Error, Result};

/// Threshold on the decade ratio below which regret counts as sub-linear.
pub const SUBLINEAR_DECADE_RATIO: f64 = 0.6;

/// One decision step of an episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLog {
    /// 1-based step.
    pub t: u64,
    pub arm: usize,
    pub reward: f64,
    pub normalized_cost: f64,
    pub exit_index: usize,
    pub correct: bool,
    pub latency_ms: f64,
    pub energy_units: f64,
    /// Best arm mean minus the chosen arm's mean.
    pub regret_increment: f64,
}

/// Prefix sums of the per-step pseudo-regret.
pub fn cumulative_regret(logs: &[StepLog]) -> Vec<f64> {
    logs.iter()
        .scan(0.0, |acc, log| {
            *acc += log.regret_increment;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SublinearityReport {
    pub horizon: usize,
    /// regret(T) / T
    pub rate_at_horizon: f64,
    /// regret(T/10) / (T/10)
    pub rate_at_decade: f64,
    pub passed: bool,
}

impl SublinearityReport {
    /// `rate_at_horizon / rate_at_decade`; 1 for linear growth.
    pub fn decade_ratio(&self) -> f64 {
        self.rate_at_horizon / self.rate_at_decade
    }
}

/// Compares the average regret per step at `T` and at `T/10`.
///
/// Passes iff `r(T) < 0.6 r(T/10)`. A curve with no regret at all passes.
pub fn sublinearity_check(curve: &[f64], horizon: usize) -> Result<SublinearityReport> {
    if horizon < 1000 {
        return Err(Error::Contract(format!(
            "sub-linearity needs a horizon of at least 1000, got {horizon}"
        )));
    }
    if curve.len() < horizon {
        return Err(Error::Contract(format!(
            "regret curve has {} steps, horizon is {horizon}",
            curve.len()
        )));
    }
    let decade = horizon / 10;
    let rate_at_horizon = curve[horizon - 1] / horizon as f64;
    let rate_at_decade = curve[decade - 1] / decade as f64;
    let passed =
        curve[horizon - 1] == 0.0 || rate_at_horizon < SUBLINEAR_DECADE_RATIO * rate_at_decade;
    Ok(SublinearityReport {
        horizon,
        rate_at_horizon,
        rate_at_decade,
        passed,
    })
}

/// One (accuracy, latency, energy) summary of a policy on an arm set.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub label: String,
    pub accuracy: f64,
    pub mean_latency_ms: f64,
    pub mean_energy_units: f64,
}

pub fn aggregate(logs: &[StepLog], label: impl Into<String>) -> Result<TradeoffPoint> {
    if logs.is_empty() {
        return Err(Error::Contract("cannot aggregate an empty log".into()));
    }
    let n = logs.len() as f64;
    let correct = logs.iter().filter(|l| l.correct).count() as f64;
    Ok(TradeoffPoint {
        label: label.into(),
        accuracy: correct / n,
        mean_latency_ms: logs.iter().map(|l| l.latency_ms).sum::<f64>() / n,
        mean_energy_units: logs.iter().map(|l| l.energy_units).sum::<f64>() / n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParetoObjective {
    AccuracyVsLatency,
    AccuracyVsEnergy,
}

impl ParetoObjective {
    pub fn cost(self, p: &TradeoffPoint) -> f64 {
        match self {
            ParetoObjective::AccuracyVsLatency => p.mean_latency_ms,
            ParetoObjective::AccuracyVsEnergy => p.mean_energy_units,
        }
    }
}

/// `a` dominates `b`: no worse on both axes, strictly better on one.
pub fn dominates(a: &TradeoffPoint, b: &TradeoffPoint, objective: ParetoObjective) -> bool {
    let (ca, cb) = (objective.cost(a), objective.cost(b));
    a.accuracy >= b.accuracy && ca <= cb && (a.accuracy > b.accuracy || ca < cb)
}

/// Indices of the non-dominated points, ordered by ascending cost.
///
/// Points that tie exactly on both coordinates are all kept, in input order.
pub fn pareto_indices(points: &[TradeoffPoint], objective: ParetoObjective) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        objective
            .cost(&points[i])
            .total_cmp(&objective.cost(&points[j]))
            .then(points[j].accuracy.total_cmp(&points[i].accuracy))
    });
    let mut frontier = Vec::new();
    // Best accuracy among points with strictly lower cost.
    let mut best_cheaper = f64::NEG_INFINITY;
    let mut start = 0;
    while start < order.len() {
        let cost = objective.cost(&points[order[start]]);
        let mut end = start;
        while end < order.len() && objective.cost(&points[order[end]]) == cost {
            end += 1;
        }
        // Sorted by accuracy descending within the group.
        let top = points[order[start]].accuracy;
        if top > best_cheaper {
            let mut group: Vec<usize> = order[start..end]
                .iter()
                .copied()
                .filter(|&i| points[i].accuracy == top)
                .collect();
            group.sort_unstable();
            frontier.extend(group);
        }
        best_cheaper = best_cheaper.max(top);
        start = end;
    }
    frontier
}

pub fn pareto_frontier(points: &[TradeoffPoint], objective: ParetoObjective) -> Vec<TradeoffPoint> {
    pareto_indices(points, objective)
        .into_iter()
        .map(|i| points[i].clone())
        .collect()
}
