//! Scenario assembly and single-controller runs shared by the commands.

use ecocoast_core::{
    dp_solve, dp_tracking_solve, heuristic_mpc_run, mimpc_run, pi_run, IoError, PiConfig,
    RunSummary, ScenarioSpec, SolveResult, SolveStatus, TrajectoryLog,
};

use crate::manifest::{Controller, Resolved};
use crate::CliError;

/// One finished controller run.
pub struct RunArtifacts {
    pub log: TrajectoryLog,
    pub summary: RunSummary,
}

/// Load the profile (and reference, when given) and assemble a validated
/// scenario from the resolved configuration.
pub fn load_scenario(r: &Resolved) -> Result<ScenarioSpec, CliError> {
    let profile = ecocoast_core::io::load_profile(&r.profile)?;
    let reference = match &r.reference {
        Some(path) => Some(ecocoast_core::io::load_reference(path)?),
        None => None,
    };
    let scenario = ScenarioSpec {
        vehicle: r.vehicle.clone(),
        options: Default::default(),
        profile,
        reference,
        v0: r.v0,
        mode: r.mode,
        weights: r.weights,
        limits: r.limits.clone(),
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Summary for a receding-horizon run, including per-step solver statistics.
fn mpc_summary(
    log: &TrajectoryLog,
    scenario: &ScenarioSpec,
    results: &[SolveResult],
) -> RunSummary {
    let mut summary = RunSummary::from_log(log, scenario.reference.as_ref());
    if !results.is_empty() {
        summary.solve_time_s_per_step =
            Some(results.iter().map(|r| r.solve_time).sum::<f64>() / results.len() as f64);
        summary.iterations = Some(results.iter().map(|r| r.iterations).sum());
        summary.fallback_count = Some(
            results
                .iter()
                .filter(|r| r.status == SolveStatus::IterationLimitFallback)
                .count(),
        );
    }
    summary
}

/// Signals of the offline tracking solution, used as the heuristic MPC's
/// fixed binary plan.
pub fn offline_binaries(scenario: &ScenarioSpec, r: &Resolved) -> Result<Vec<u8>, CliError> {
    let solution = dp_tracking_solve(scenario, &r.grid(), &r.dp_options)?;
    Ok(solution.trajectory.signals())
}

/// Run one controller on the scenario.
pub fn run_controller(
    scenario: &ScenarioSpec,
    r: &Resolved,
    controller: Controller,
) -> Result<RunArtifacts, CliError> {
    match controller {
        Controller::Dp => {
            let solution = dp_solve(scenario, &r.grid(), &r.dp_options)?;
            let summary = RunSummary::from_log(&solution.trajectory, scenario.reference.as_ref());
            Ok(RunArtifacts {
                log: solution.trajectory,
                summary,
            })
        }
        Controller::DpTracking => {
            let solution = dp_tracking_solve(scenario, &r.grid(), &r.dp_options)?;
            let summary = RunSummary::from_log(&solution.trajectory, scenario.reference.as_ref());
            Ok(RunArtifacts {
                log: solution.trajectory,
                summary,
            })
        }
        Controller::Mimpc => {
            let (log, results) = mimpc_run(scenario, &r.mpc_config())?;
            let summary = mpc_summary(&log, scenario, &results);
            Ok(RunArtifacts { log, summary })
        }
        Controller::HeuristicMpc => {
            if scenario.reference.is_none() {
                return Err(CliError::Io(IoError::Validation {
                    what: "the heuristic MPC needs a reference trace (--reference)".to_string(),
                }));
            }
            let binaries = offline_binaries(scenario, r)?;
            let (log, results) = heuristic_mpc_run(scenario, &binaries, &r.mpc_config())?;
            let summary = mpc_summary(&log, scenario, &results);
            Ok(RunArtifacts { log, summary })
        }
        Controller::Pi => {
            let config = PiConfig::for_mode(scenario.mode);
            let log = pi_run(scenario, &config)?;
            let summary = RunSummary::from_log(&log, scenario.reference.as_ref());
            Ok(RunArtifacts { log, summary })
        }
    }
}
