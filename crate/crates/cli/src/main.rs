//! `ecocoast` — experiment harness for the grade-preview coasting
//! controllers: single runs, Pareto sweeps, controller comparisons, and
//! reference-perturbation studies.
//!
//! Exit codes: 0 success, 1 I/O or manifest error, 2 infeasible problem
//! (including simulation failures such as stalls, with the failing step
//! index in the diagnostic).

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use ecocoast_core::{IoError, SimulationError, SolveError};

mod commands;
mod manifest;
mod plot;
mod runner;

use manifest::{CommonArgs, Controller};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),

    #[error("manifest {path}: {what}")]
    Manifest { path: String, what: String },

    #[error(transparent)]
    Solve(#[from] SolveError),

    #[error(transparent)]
    Simulation(#[from] SimulationError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Manifest { .. } => 1,
            CliError::Solve(_) | CliError::Simulation(_) => 2,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "ecocoast",
    version,
    about = "Grade-preview eco-coasting experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one controller on a scenario; write trajectory CSV + summary JSON.
    Simulate {
        /// Controller to run (default: mimpc, or the manifest entry).
        #[arg(long, value_enum)]
        controller: Option<Controller>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Offline DP solve, fuel vs. travel-time objective.
    Dp {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Fuel/time Pareto sweep across coasting mechanisms.
    Pareto {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Closed-loop mixed-integer MPC run.
    Mpc {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Receding-horizon run with binaries frozen from the offline solution.
    Heuristic {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// PI cruise baseline run.
    Pi {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run several controllers on one scenario and tabulate the results.
    Compare {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Perturb the reference in a window; compare online vs. heuristic MPC.
    Perturb {
        /// Speed delta inside the window [km/h]; drawn from --seed if absent.
        #[arg(long, allow_negative_numbers = true)]
        delta: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { controller, common } => {
            let mut resolved = manifest::resolve(&common, Controller::Mimpc)?;
            // Precedence: flag, then manifest, then the mimpc default.
            if let Some(c) = controller {
                resolved.controller = c;
            } else if let Some(path) = &common.config {
                if let Some(c) = manifest::RunManifest::load(path)?.controller {
                    resolved.controller = c;
                }
            }
            commands::cmd_simulate(&resolved)
        }
        Command::Dp { common } => {
            commands::cmd_simulate(&manifest::resolve(&common, Controller::Dp)?)
        }
        Command::Mpc { common } => {
            commands::cmd_simulate(&manifest::resolve(&common, Controller::Mimpc)?)
        }
        Command::Heuristic { common } => {
            commands::cmd_simulate(&manifest::resolve(&common, Controller::HeuristicMpc)?)
        }
        Command::Pi { common } => {
            commands::cmd_simulate(&manifest::resolve(&common, Controller::Pi)?)
        }
        Command::Pareto { common } => {
            commands::cmd_pareto(&manifest::resolve(&common, Controller::Dp)?)
        }
        Command::Compare { common } => {
            commands::cmd_compare(&manifest::resolve(&common, Controller::Mimpc)?)
        }
        Command::Perturb { delta, common } => {
            let mut resolved = manifest::resolve(&common, Controller::Mimpc)?;
            if delta.is_some() {
                resolved.perturb_delta_kmh = delta;
            }
            commands::cmd_perturb(&resolved)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version go to stdout and exit 0; usage errors are I/O-class.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
