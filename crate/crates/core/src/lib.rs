//! Online selection of early-exit confidence thresholds with UCB bandits.
//!
//! Each candidate threshold is an arm. A [`policy::Policy`] picks one per
//! input, the [`env::Environment`] resolves where inference exits under it,
//! and the reward trades the exit's confidence and gating score against its
//! depth. [`analytics`] turns the step logs into regret curves and
//! accuracy/cost Pareto frontiers; [`harness`] runs whole config grids.

pub mod analytics;
pub mod env;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod policy;

pub use error::{Error, Result};
