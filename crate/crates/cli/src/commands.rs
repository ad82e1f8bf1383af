//! Subcommand implementations. Every command creates its output directory,
//! writes artifacts through the shared CSV/JSON writers, and re-parses each
//! emitted file as a schema check.

use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use ecocoast_core::{
    heuristic_mpc_run, mimpc_run, pareto_sweep, IoError, RunSummary, ScenarioSpec, TrajectoryLog,
    KMH_TO_MPS, MPS_TO_KMH,
};

use crate::manifest::{mode_name, Controller, Resolved};
use crate::plot::{self, Panel, Series};
use crate::runner::{load_scenario, offline_binaries, run_controller, RunArtifacts};
use crate::CliError;

fn ensure_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| {
        CliError::Io(IoError::Io {
            path: dir.display().to_string(),
            source,
        })
    })
}

fn write_text(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| {
        CliError::Io(IoError::Io {
            path: path.display().to_string(),
            source,
        })
    })
}

/// Write a trajectory log and immediately read it back (schema check).
fn write_log_checked(log: &TrajectoryLog, path: &Path) -> Result<(), CliError> {
    ecocoast_core::io::write_log(log, path)?;
    ecocoast_core::io::read_log(path)?;
    Ok(())
}

fn write_summary_checked(summary: &RunSummary, path: &Path) -> Result<(), CliError> {
    ecocoast_core::io::write_summary(summary, path)?;
    ecocoast_core::io::read_summary(path)?;
    Ok(())
}

fn speed_series(label: &str, log: &TrajectoryLog) -> Series {
    Series {
        label: label.to_string(),
        points: log
            .steps
            .iter()
            .map(|s| (s.distance_m, s.speed_mps * MPS_TO_KMH))
            .collect(),
    }
}

fn signal_series(label: &str, log: &TrajectoryLog) -> Series {
    Series {
        label: label.to_string(),
        points: log
            .steps
            .iter()
            .map(|s| (s.distance_m, s.coast_signal as f64))
            .collect(),
    }
}

fn reference_series(scenario: &ScenarioSpec) -> Option<Series> {
    let reference = scenario.reference.as_ref()?;
    Some(Series {
        label: "reference".to_string(),
        points: reference
            .speeds
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as f64 * reference.step_length, v * MPS_TO_KMH))
            .collect(),
    })
}

fn grade_panel(scenario: &ScenarioSpec) -> Panel {
    Panel {
        title: "road grade [deg]".to_string(),
        series: vec![Series {
            label: "grade".to_string(),
            points: scenario
                .profile
                .grades
                .iter()
                .enumerate()
                .map(|(i, &g)| (i as f64 * scenario.profile.step_length, g.to_degrees()))
                .collect(),
        }],
    }
}

/// Standard stacked layout: speed, grade, coast signal, torques.
fn trajectory_panels(scenario: &ScenarioSpec, runs: &[(&str, &TrajectoryLog)]) -> Vec<Panel> {
    let mut speed = Panel {
        title: "speed [km/h]".to_string(),
        series: runs.iter().map(|(n, log)| speed_series(n, log)).collect(),
    };
    if let Some(s) = reference_series(scenario) {
        speed.series.push(s);
    }
    let signal = Panel {
        title: "coast signal".to_string(),
        series: runs.iter().map(|(n, log)| signal_series(n, log)).collect(),
    };
    let mut torque = Panel {
        title: "torque [Nm]".to_string(),
        series: Vec::new(),
    };
    for (n, log) in runs {
        torque.series.push(Series {
            label: format!("{n} engine"),
            points: log
                .steps
                .iter()
                .map(|s| (s.distance_m, s.engine_torque_nm))
                .collect(),
        });
        torque.series.push(Series {
            label: format!("{n} brake"),
            points: log
                .steps
                .iter()
                .map(|s| (s.distance_m, -s.brake_torque_nm))
                .collect(),
        });
    }
    vec![speed, grade_panel(scenario), signal, torque]
}

/// Run one controller; write trajectory.csv, summary.json, run.svg.
pub fn cmd_simulate(r: &Resolved) -> Result<(), CliError> {
    let scenario = load_scenario(r)?;
    let RunArtifacts { log, summary } = run_controller(&scenario, r, r.controller)?;
    ensure_out(&r.out)?;
    write_log_checked(&log, &r.out.join("trajectory.csv"))?;
    write_summary_checked(&summary, &r.out.join("summary.json"))?;
    plot::write(
        r.out.join("run.svg"),
        "distance [m]",
        &trajectory_panels(&scenario, &[(r.controller.name(), &log)]),
    )?;
    println!(
        "{}: fuel {:.3} g, time {:.2} s, {} switches -> {}",
        r.controller.name(),
        summary.fuel_g,
        summary.time_s,
        summary.switch_count,
        r.out.display()
    );
    Ok(())
}

/// Beta sweep per mode; writes pareto.csv and an overlaid front plot.
pub fn cmd_pareto(r: &Resolved) -> Result<(), CliError> {
    let scenario = load_scenario(r)?;
    ensure_out(&r.out)?;

    let mut csv = String::from("beta,mode,fuel_g,time_s\n");
    let mut panels = Panel {
        title: "fuel [g] vs travel time".to_string(),
        series: Vec::new(),
    };
    let mut rows = 0usize;
    for &mode in &r.pareto_modes {
        let mut s = scenario.clone();
        s.mode = mode;
        let points = pareto_sweep(&s, &r.grid(), &r.dp_options, &r.pareto_betas);
        let mut front = Vec::new();
        for p in &points {
            if let Some(summary) = &p.summary {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    p.beta,
                    mode_name(mode),
                    summary.fuel_g,
                    summary.time_s
                ));
                front.push((summary.time_s, summary.fuel_g));
                rows += 1;
            }
        }
        panels.series.push(Series {
            label: mode_name(mode).to_string(),
            points: front,
        });
    }
    write_text(&r.out.join("pareto.csv"), &csv)?;
    plot::write(r.out.join("pareto.svg"), "travel time [s]", &[panels])?;
    println!(
        "pareto: {rows} points ({} modes x {} betas) -> {}",
        r.pareto_modes.len(),
        r.pareto_betas.len(),
        r.out.display()
    );
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Run each requested controller on the same scenario; write the comparison
/// table, per-controller logs, and overlaid plots.
pub fn cmd_compare(r: &Resolved) -> Result<(), CliError> {
    use rayon::prelude::*;
    let scenario = load_scenario(r)?;
    ensure_out(&r.out)?;

    let runs: Vec<(Controller, RunArtifacts)> = r
        .compare_controllers
        .par_iter()
        .map(|&c| run_controller(&scenario, r, c).map(|a| (c, a)))
        .collect::<Result<_, _>>()?;

    let mut csv =
        String::from("controller,fuel_g,time_s,tracking_rmse_mps,switch_count,mean_solve_time_s\n");
    for (c, a) in &runs {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.name(),
            a.summary.fuel_g,
            a.summary.time_s,
            fmt_opt(a.summary.tracking_rmse_mps),
            a.summary.switch_count,
            fmt_opt(a.summary.solve_time_s_per_step)
        ));
    }
    write_text(&r.out.join("compare.csv"), &csv)?;
    for (c, a) in &runs {
        write_log_checked(&a.log, &r.out.join(format!("trajectory_{}.csv", c.name())))?;
    }
    let named: Vec<(&str, &TrajectoryLog)> =
        runs.iter().map(|(c, a)| (c.name(), &a.log)).collect();
    plot::write(
        r.out.join("compare.svg"),
        "distance [m]",
        &trajectory_panels(&scenario, &named),
    )?;
    println!(
        "compare: {} controllers -> {}",
        runs.len(),
        r.out.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct BranchReport {
    fuel_g: f64,
    time_s: f64,
    tracking_rmse_mps: f64,
    switch_count: usize,
}

impl BranchReport {
    fn new(log: &TrajectoryLog, scenario: &ScenarioSpec) -> Self {
        let reference = scenario.reference.as_ref().expect("checked upstream");
        Self {
            fuel_g: log.total_fuel_g(),
            time_s: log.total_time_s(),
            tracking_rmse_mps: log.tracking_rmse(reference),
            switch_count: log.switch_count(),
        }
    }
}

/// Perturbation delta report. Deliberately excludes wall-clock solve times
/// so re-runs with the same seed are byte-identical.
#[derive(Serialize)]
struct DeltaReport {
    delta_kmh: f64,
    start_step: usize,
    end_step: usize,
    seed: u64,
    mimpc: BranchReport,
    heuristic: BranchReport,
    /// heuristic RMSE minus mimpc RMSE [m/s].
    rmse_increase_mps: f64,
}

/// Perturb the reference inside a window, then run the online MPC and the
/// heuristic MPC (binaries frozen from the unperturbed offline solution)
/// against the perturbed reference.
pub fn cmd_perturb(r: &Resolved) -> Result<(), CliError> {
    let scenario = load_scenario(r)?;
    if scenario.reference.is_none() {
        return Err(CliError::Io(IoError::Validation {
            what: "perturbation study needs a reference trace (--reference)".to_string(),
        }));
    }
    let n = scenario.len();
    let (start, end) = r.perturb_window.unwrap_or((n / 3, 2 * n / 3));
    let delta_kmh = match r.perturb_delta_kmh {
        Some(d) => d,
        None => ChaCha8Rng::seed_from_u64(r.seed).gen_range(-3.0..=3.0),
    };
    if start >= end || end > n {
        return Err(CliError::Io(IoError::Validation {
            what: format!("perturbation window [{start}, {end}) out of range (profile has {n} steps)"),
        }));
    }

    let mut perturbed = scenario.clone();
    {
        let reference = perturbed.reference.as_mut().unwrap();
        for v in &mut reference.speeds[start..end] {
            *v = (*v + delta_kmh * KMH_TO_MPS).clamp(scenario.limits.v_min, scenario.limits.v_max);
        }
    }
    perturbed.validate()?;

    let binaries = offline_binaries(&scenario, r)?;
    let config = r.mpc_config();
    let (mimpc_log, _) = mimpc_run(&perturbed, &config)?;
    let (heuristic_log, _) = heuristic_mpc_run(&perturbed, &binaries, &config)?;

    ensure_out(&r.out)?;
    ecocoast_core::io::write_reference(
        perturbed.reference.as_ref().unwrap(),
        r.out.join("perturbed_reference.csv"),
    )?;
    ecocoast_core::io::load_reference(r.out.join("perturbed_reference.csv"))?;
    write_log_checked(&mimpc_log, &r.out.join("mimpc_trajectory.csv"))?;
    write_log_checked(&heuristic_log, &r.out.join("heuristic_trajectory.csv"))?;

    let report = DeltaReport {
        delta_kmh,
        start_step: start,
        end_step: end,
        seed: r.seed,
        mimpc: BranchReport::new(&mimpc_log, &perturbed),
        heuristic: BranchReport::new(&heuristic_log, &perturbed),
        rmse_increase_mps: heuristic_log.tracking_rmse(perturbed.reference.as_ref().unwrap())
            - mimpc_log.tracking_rmse(perturbed.reference.as_ref().unwrap()),
    };
    write_text(
        &r.out.join("delta.json"),
        &serde_json::to_string_pretty(&report).expect("report serialization"),
    )?;
    plot::write(
        r.out.join("perturb.svg"),
        "distance [m]",
        &trajectory_panels(
            &perturbed,
            &[("mimpc", &mimpc_log), ("heuristic-mpc", &heuristic_log)],
        ),
    )?;
    println!(
        "perturb: {delta_kmh:+.2} km/h over steps [{start}, {end}), \
         rmse mimpc {:.4} m/s vs heuristic {:.4} m/s -> {}",
        report.mimpc.tracking_rmse_mps,
        report.heuristic.tracking_rmse_mps,
        r.out.display()
    );
    Ok(())
}
