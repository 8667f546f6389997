use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::env::write_trace;
use crate::error::Result;

use super::config::ExperimentConfig;
use super::grid::{generate_trace, run_grid, write_outputs, OutputSelection};

#[derive(Debug, Parser)]
#[command(
    name = "eebandit",
    version,
    about = "Bandit threshold selection for early-exit inference"
)]
pub struct Cli {
    /// Added (wrapping) to every seed in the config.
    #[arg(long, global = true, default_value_t = 0, value_name = "N")]
    pub seed_offset: u64,

    /// Only report errors.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full grid and write regret and trade-off CSVs.
    Run { config: PathBuf },
    /// Run the grid and write only the regret CSVs.
    Regret { config: PathBuf },
    /// Run the grid and write only the trade-off table.
    Pareto { config: PathBuf },
    /// Check the config (and trace, if any) without running anything.
    Validate { config: PathBuf },
    /// Write the synthetic inputs of the first episode as a replayable trace.
    GenTrace { config: PathBuf, out: PathBuf },
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let load =
        |path: &Path| ExperimentConfig::load(path).map(|c| c.with_seed_offset(cli.seed_offset));
    let say = |msg: String| {
        if !cli.quiet {
            println!("{msg}");
        }
    };
    let (path, selection) = match &cli.command {
        Command::Validate { config } => {
            let c = load(config)?;
            c.validate_with_environment()?;
            say(format!(
                "{}: ok ({} episodes)",
                config.display(),
                c.num_episodes()
            ));
            return Ok(());
        }
        Command::GenTrace { config, out } => {
            let records = generate_trace(&load(config)?)?;
            write_trace(out, &records)?;
            say(format!(
                "wrote {} records to {}",
                records.len(),
                out.display()
            ));
            return Ok(());
        }
        Command::Run { config } => (config, OutputSelection::ALL),
        Command::Regret { config } => (
            config,
            OutputSelection {
                regret: true,
                tradeoff: false,
            },
        ),
        Command::Pareto { config } => (
            config,
            OutputSelection {
                regret: false,
                tradeoff: true,
            },
        ),
    };
    let config = load(path)?;
    let result = run_grid(&config)?;
    let files = write_outputs(&result, &config.output_dir, selection)?;
    say(format!(
        "{} episodes, {} files written to {}",
        result.episodes.len(),
        files.len(),
        config.output_dir.display()
    ));
    Ok(())
}
