//! Oracles shared by the integration tests and the acceptance runner.
//!
//! The oracles in this file never call into the library; each is written out
//! from the definitions. `drive` runs the library side of each comparison.
#![allow(dead_code)]

pub mod drive;

/// The five index rules, one arm history per arm, recomputed from scratch at
/// every step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RefKind {
    Ucb1,
    UcbV,
    UcbTuned,
    UcbBayes,
    UcbBwk,
}

pub const REF_KINDS: [RefKind; 5] = [
    RefKind::Ucb1,
    RefKind::UcbV,
    RefKind::UcbTuned,
    RefKind::UcbBayes,
    RefKind::UcbBwk,
];

pub struct RefBandit {
    pub kind: RefKind,
    pub rewards: Vec<Vec<f64>>,
    pub costs: Vec<Vec<f64>>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn pop_variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Standard normal CDF via erfc.
pub fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Quantile by bisection on `phi`.
pub fn phi_inv_bisect(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if phi(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Posterior (lambda, mu, alpha, beta) by one conjugate update per reward.
pub fn nig_sequential(prior: (f64, f64, f64, f64), xs: &[f64]) -> (f64, f64, f64, f64) {
    let (mu0, lambda0, alpha0, beta0) = prior;
    let (mut mu, mut lambda, mut alpha, mut beta) = (mu0, lambda0, alpha0, beta0);
    for &x in xs {
        beta += lambda * (x - mu) * (x - mu) / (2.0 * (lambda + 1.0));
        mu = (lambda * mu + x) / (lambda + 1.0);
        lambda += 1.0;
        alpha += 0.5;
    }
    (lambda, mu, alpha, beta)
}

impl RefBandit {
    pub fn new(kind: RefKind, k: usize) -> Self {
        Self {
            kind,
            rewards: vec![Vec::new(); k],
            costs: vec![Vec::new(); k],
        }
    }

    fn score(&self, i: usize, t: u64) -> f64 {
        let r = &self.rewards[i];
        let n = r.len() as f64;
        let lt = (t as f64).ln();
        match self.kind {
            RefKind::Ucb1 => mean(r) + (2.0 * lt / n).sqrt(),
            RefKind::UcbV => mean(r) + (2.0 * pop_variance(r) * lt / n).sqrt() + 3.0 * 1.0 * lt / n,
            RefKind::UcbTuned => {
                let v = (pop_variance(r) + (2.0 * lt / n).sqrt()).min(0.25);
                mean(r) + (lt / n * v).sqrt()
            }
            RefKind::UcbBayes => {
                let q = if t < 3 {
                    0.95
                } else {
                    1.0 - 1.0 / (t as f64 * lt.powf(1.0))
                };
                let z = phi_inv_bisect(q);
                let (lambda, mu, alpha, beta) = nig_sequential((0.5, 1.0, 2.0, 0.1), r);
                mu + z * (beta / ((alpha - 1.0) * lambda)).sqrt()
            }
            RefKind::UcbBwk => {
                let conf = (2.0 * lt / n).sqrt();
                let tau = (lt / t as f64).sqrt();
                let lcb = (mean(&self.costs[i]) - conf).max(tau);
                (mean(r) + conf) / lcb
            }
        }
    }

    pub fn choose(&self, t: u64) -> usize {
        for (i, r) in self.rewards.iter().enumerate() {
            if r.is_empty() {
                return i;
            }
        }
        let mut best = 0;
        for i in 1..self.rewards.len() {
            if self.score(i, t) > self.score(best, t) {
                best = i;
            }
        }
        best
    }

    pub fn observe(&mut self, arm: usize, reward: f64, cost: f64) {
        self.rewards[arm].push(reward);
        self.costs[arm].push(cost);
    }
}

/// Deterministic 3-arm environment: the n-th pull of arm i returns entry
/// `n mod len` of that arm's cycle.
pub struct RewardTable {
    pub rewards: Vec<Vec<f64>>,
    pub costs: Vec<Vec<f64>>,
}

impl RewardTable {
    pub fn three_arms() -> Self {
        Self {
            rewards: vec![
                vec![0.42, 0.71, 0.18, 0.55, 0.63],
                vec![0.66, 0.49, 0.81, 0.37],
                vec![0.29, 0.92, 0.58],
            ],
            costs: vec![
                vec![0.25, 0.25, 0.5],
                vec![1.0, 0.95],
                vec![1.0, 1.0, 0.9, 1.0],
            ],
        }
    }

    pub fn pull(&self, arm: usize, n: usize) -> (f64, f64) {
        let r = &self.rewards[arm];
        let c = &self.costs[arm];
        (r[n % r.len()], c[n % c.len()])
    }
}

/// Arm sequence of the reference bandit on the table.
pub fn reference_sequence(kind: RefKind, table: &RewardTable, horizon: u64) -> Vec<usize> {
    let k = table.rewards.len();
    let mut bandit = RefBandit::new(kind, k);
    let mut pulls = vec![0usize; k];
    (1..=horizon)
        .map(|t| {
            let arm = bandit.choose(t);
            let (r, c) = table.pull(arm, pulls[arm]);
            pulls[arm] += 1;
            bandit.observe(arm, r, c);
            arm
        })
        .collect()
}

/// O(n^2) non-domination: (accuracy up, cost down).
pub fn brute_force_frontier(points: &[(f64, f64)]) -> Vec<usize> {
    let dominated = |i: usize| {
        points.iter().enumerate().any(|(j, &(aj, cj))| {
            let (ai, ci) = points[i];
            j != i && aj >= ai && cj <= ci && (aj > ai || cj < ci)
        })
    };
    (0..points.len()).filter(|&i| !dominated(i)).collect()
}
