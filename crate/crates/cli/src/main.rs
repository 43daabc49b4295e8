//! `spinpair`: verification, simulation, compilation and timing estimates
//! for exchange-only encoded spin qubits.
//!
//! Exit codes: 0 success, 1 failed check or non-convergent integration,
//! 2 bad input.

mod compile;
mod estimate;
mod options;
mod simulate;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "spinpair", version, about = "Exchange-only spin-pair qubit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the nAND constructions and operator mappings on a device.
    Verify(verify::Args),
    /// Propagate a pulse schedule or a synthesized resonant pulse.
    Simulate(simulate::Args),
    /// Lower a logical circuit to a pulse schedule.
    Compile(compile::Args),
    /// Gate durations and clock rate from the timing model.
    Estimate(estimate::Args),
}

/// Failure of a subcommand, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, files or configuration (exit 2).
    Input(anyhow::Error),
    /// Integration or a check failed (exit 1).
    Failed(anyhow::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(e) | CliError::Failed(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<spinpair_core::Error> for CliError {
    fn from(e: spinpair_core::Error) -> Self {
        match e {
            spinpair_core::Error::NonConvergence { .. } => CliError::Failed(e.into()),
            other => CliError::Input(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Input(e)
    }
}

/// Whether every check of a subcommand passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail,
}

pub type CliResult = Result<Outcome, CliError>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(args) => verify::run(&args),
        Command::Simulate(args) => simulate::run(&args),
        Command::Compile(args) => compile::run(&args),
        Command::Estimate(args) => estimate::run(&args),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CliError::Failed(_) => ExitCode::from(1),
                CliError::Input(_) => ExitCode::from(2),
            }
        }
    }
}
