use eebandit::policy::{Policy, PolicyConfig, PolicyKind};

use super::{RefKind, RewardTable};

pub fn library_kind(kind: RefKind) -> PolicyKind {
    match kind {
        RefKind::Ucb1 => PolicyKind::Ucb1,
        RefKind::UcbV => PolicyKind::UcbV,
        RefKind::UcbTuned => PolicyKind::UcbTuned,
        RefKind::UcbBayes => PolicyKind::UcbBayes,
        RefKind::UcbBwk => PolicyKind::UcbBwk,
    }
}

/// Arm sequence of the library policy on the table.
pub fn library_sequence(kind: RefKind, table: &RewardTable, horizon: u64) -> Vec<usize> {
    let k = table.rewards.len();
    let mut policy = Policy::new(PolicyConfig::new(library_kind(kind)), k).unwrap();
    let mut pulls = vec![0usize; k];
    (1..=horizon)
        .map(|t| {
            let arm = policy.select_arm(t).unwrap();
            let (r, c) = table.pull(arm, pulls[arm]);
            pulls[arm] += 1;
            policy.update_arm(arm, r, c).unwrap();
            arm
        })
        .collect()
}
