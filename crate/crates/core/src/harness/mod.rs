//! Config-driven experiment grid and the command-line front end.

pub mod cli;
pub mod config;
mod episode;
mod format;
pub mod grid;

pub use config::{EnvironmentSpec, ExperimentConfig, NamedArmSet, NamedPolicy};
pub use episode::run_episode;
pub use format::format_real;
pub use grid::{
    generate_trace, run_grid, write_outputs, EpisodeResult, GridResult, OutputSelection,
    TradeoffRow,
};
