//! Run manifests: a TOML file with every knob optional, overlaid with
//! command-line flags, resolved against the baked-in defaults.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ecocoast_core::{
    CostWeights, DpGrid, DpOptions, IoError, MpcConfig, OperatingLimits, PowertrainMode,
    SolverKind, VehicleParams, KMH_TO_MPS,
};

use crate::CliError;

/// Which controller produces the trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Controller {
    /// Offline DP, fuel vs. travel-time objective.
    Dp,
    /// Offline DP, fuel vs. reference-tracking objective.
    DpTracking,
    /// Closed-loop mixed-integer MPC.
    Mimpc,
    /// Receding-horizon MPC with binaries fixed from the offline DP.
    HeuristicMpc,
    /// PI cruise baseline.
    Pi,
}

impl Controller {
    pub fn name(self) -> &'static str {
        match self {
            Controller::Dp => "dp",
            Controller::DpTracking => "dp-tracking",
            Controller::Mimpc => "mimpc",
            Controller::HeuristicMpc => "heuristic-mpc",
            Controller::Pi => "pi",
        }
    }
}

/// Coasting mechanism, in CLI/manifest spelling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Baseline,
    FuelCutOff,
    EngineStartStop,
}

impl ModeArg {
    pub fn to_mode(self) -> PowertrainMode {
        match self {
            ModeArg::Baseline => PowertrainMode::Baseline,
            ModeArg::FuelCutOff => PowertrainMode::FuelCutOff,
            ModeArg::EngineStartStop => PowertrainMode::EngineStartStop,
        }
    }
}

pub fn mode_name(mode: PowertrainMode) -> &'static str {
    match mode {
        PowertrainMode::Baseline => "baseline",
        PowertrainMode::FuelCutOff => "fuel-cut-off",
        PowertrainMode::EngineStartStop => "engine-start-stop",
    }
}

/// Flags shared by every subcommand. Each one overrides the corresponding
/// manifest entry.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Path to a TOML run manifest.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Slope profile CSV (`distance_m,grade_deg`).
    #[arg(long)]
    pub profile: Option<PathBuf>,
    /// Reference speed CSV (`distance_m,speed_kmh`).
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Coasting mechanism.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Fuel weight in [0, 1]; (1 - beta) weighs time or tracking.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Fuel cut-off switch penalty weight.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// MPC preview horizon in distance steps.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Minimum off-steps after a coast-signal 1 -> 0 transition.
    #[arg(long)]
    pub dmin: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// RNG seed for perturbation studies.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Partial vehicle-parameter override; unset fields keep the defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VehicleOverrides {
    effective_mass: Option<f64>,
    drag_coeff: Option<f64>,
    frontal_area: Option<f64>,
    air_density: Option<f64>,
    rolling_coeff: Option<f64>,
    gravity: Option<f64>,
    gearbox_efficiency: Option<f64>,
    wheel_radius: Option<f64>,
    gear_ratio: Option<f64>,
    final_drive_ratio: Option<f64>,
    engine_drag_torque: Option<f64>,
    engine_inertia: Option<f64>,
    fuel_coeffs: Option<[f64; 4]>,
}

impl VehicleOverrides {
    fn apply(&self, p: &mut VehicleParams) {
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field { p.$field = v; })*
            };
        }
        set!(
            effective_mass,
            drag_coeff,
            frontal_area,
            air_density,
            rolling_coeff,
            gravity,
            gearbox_efficiency,
            wheel_radius,
            gear_ratio,
            final_drive_ratio,
            engine_drag_torque,
            engine_inertia,
            fuel_coeffs
        );
    }
}

/// Partial operating-envelope override (speeds in km/h on disk).
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitOverrides {
    v_min_kmh: Option<f64>,
    v_max_kmh: Option<f64>,
    engine_torque_max: Option<f64>,
    brake_torque_max: Option<f64>,
}

impl LimitOverrides {
    fn apply(&self, l: &mut OperatingLimits) {
        if let Some(v) = self.v_min_kmh {
            l.v_min = v * KMH_TO_MPS;
        }
        if let Some(v) = self.v_max_kmh {
            l.v_max = v * KMH_TO_MPS;
        }
        if let Some(v) = self.engine_torque_max {
            l.engine_torque_max = v;
        }
        if let Some(v) = self.brake_torque_max {
            l.brake_torque_max = v;
        }
    }
}

/// DP grid and terminal-window overrides.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DpSection {
    pub speeds: Option<usize>,
    pub engine_torques: Option<usize>,
    pub brake_torques: Option<usize>,
    pub terminal_window_kmh: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParetoSection {
    pub betas: Option<Vec<f64>>,
    pub modes: Option<Vec<ModeArg>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSection {
    pub controllers: Option<Vec<Controller>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbSection {
    /// First perturbed step (inclusive).
    pub start_step: Option<usize>,
    /// One past the last perturbed step.
    pub end_step: Option<usize>,
    /// Speed delta added inside the window [km/h]; drawn from the seed
    /// when absent.
    pub delta_kmh: Option<f64>,
}

/// On-disk manifest. Every field is optional; see [`Resolved`] for the
/// defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub profile: Option<PathBuf>,
    pub reference: Option<PathBuf>,
    pub controller: Option<Controller>,
    pub mode: Option<ModeArg>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub beta: Option<f64>,
    pub alpha: Option<f64>,
    pub v0_kmh: Option<f64>,
    pub horizon: Option<usize>,
    pub dmin: Option<usize>,
    pub max_iterations: Option<usize>,
    #[serde(default)]
    pub vehicle: VehicleOverrides,
    #[serde(default)]
    pub limits: LimitOverrides,
    #[serde(default)]
    pub dp: DpSection,
    #[serde(default)]
    pub pareto: ParetoSection,
    #[serde(default)]
    pub compare: CompareSection,
    #[serde(default)]
    pub perturb: PerturbSection,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let contents = fs::read_to_string(path).map_err(|source| IoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        toml::from_str(&contents).map_err(|e| CliError::Manifest {
            path: path.display().to_string(),
            what: e.to_string(),
        })
    }
}

/// Fully-resolved run configuration: manifest defaults, flag overrides,
/// and the baked-in parameter tables combined.
#[derive(Debug)]
pub struct Resolved {
    pub profile: PathBuf,
    pub reference: Option<PathBuf>,
    pub controller: Controller,
    pub mode: PowertrainMode,
    pub out: PathBuf,
    pub seed: u64,
    pub v0: f64,
    pub weights: CostWeights,
    pub vehicle: VehicleParams,
    pub limits: OperatingLimits,
    pub horizon: usize,
    pub dmin: usize,
    pub max_iterations: usize,
    pub dp_options: DpOptions,
    grid_points: (usize, usize, usize),
    pub pareto_betas: Vec<f64>,
    pub pareto_modes: Vec<PowertrainMode>,
    pub compare_controllers: Vec<Controller>,
    pub perturb_window: Option<(usize, usize)>,
    pub perturb_delta_kmh: Option<f64>,
}

impl Resolved {
    pub fn grid(&self) -> DpGrid {
        let (s, e, b) = self.grid_points;
        DpGrid::with_resolution(&self.limits, s, e, b)
    }

    pub fn mpc_config(&self) -> MpcConfig {
        MpcConfig {
            horizon_steps: self.horizon,
            d_min: self.dmin,
            weights: self.weights,
            max_iterations: self.max_iterations,
            solver_kind: SolverKind::BranchAndBound,
        }
    }
}

/// Merge manifest and flags. Flags win; anything still unset falls back
/// to the defaults (fuel cut-off, beta 0.5, 75 km/h, horizon 20, d_min 4).
pub fn resolve(args: &CommonArgs, controller: Controller) -> Result<Resolved, CliError> {
    let manifest = match &args.config {
        Some(path) => RunManifest::load(path)?,
        None => RunManifest::default(),
    };

    let profile = args
        .profile
        .clone()
        .or(manifest.profile)
        .ok_or_else(|| IoError::Validation {
            what: "no slope profile given (use --profile or the manifest `profile` key)"
                .to_string(),
        })?;

    let mut vehicle = VehicleParams::default();
    manifest.vehicle.apply(&mut vehicle);
    let mut limits = OperatingLimits::default();
    manifest.limits.apply(&mut limits);

    let mut dp_options = DpOptions::default();
    if let Some(w) = manifest.dp.terminal_window_kmh {
        dp_options.terminal_window = w * KMH_TO_MPS;
    }

    let weights = CostWeights {
        beta: args.beta.or(manifest.beta).unwrap_or(0.5),
        alpha: args.alpha.or(manifest.alpha).unwrap_or(0.0),
    };

    let pareto_betas = manifest
        .pareto
        .betas
        .unwrap_or_else(|| (1..=9).map(|i| i as f64 / 10.0).collect());
    let pareto_modes = manifest
        .pareto
        .modes
        .map(|modes| modes.into_iter().map(ModeArg::to_mode).collect())
        .unwrap_or_else(|| {
            vec![
                PowertrainMode::Baseline,
                PowertrainMode::FuelCutOff,
                PowertrainMode::EngineStartStop,
            ]
        });
    let compare_controllers = manifest
        .compare
        .controllers
        .unwrap_or_else(|| vec![Controller::Pi, Controller::Mimpc, Controller::DpTracking]);

    let perturb_window = match (manifest.perturb.start_step, manifest.perturb.end_step) {
        (Some(a), Some(b)) => Some((a, b)),
        (None, None) => None,
        _ => {
            return Err(CliError::Manifest {
                path: args
                    .config
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
                what: "perturb window needs both start_step and end_step".to_string(),
            })
        }
    };

    Ok(Resolved {
        profile,
        reference: args.reference.clone().or(manifest.reference),
        controller,
        mode: args
            .mode
            .or(manifest.mode)
            .map(ModeArg::to_mode)
            .unwrap_or(PowertrainMode::FuelCutOff),
        out: args
            .out
            .clone()
            .or(manifest.out)
            .unwrap_or_else(|| PathBuf::from("out")),
        seed: args.seed.or(manifest.seed).unwrap_or(0),
        v0: manifest.v0_kmh.unwrap_or(75.0) * KMH_TO_MPS,
        weights,
        vehicle,
        limits,
        horizon: args.horizon.or(manifest.horizon).unwrap_or(20),
        dmin: args.dmin.or(manifest.dmin).unwrap_or(4),
        max_iterations: manifest.max_iterations.unwrap_or(200),
        dp_options,
        grid_points: (
            manifest.dp.speeds.unwrap_or(81),
            manifest.dp.engine_torques.unwrap_or(13),
            manifest.dp.brake_torques.unwrap_or(6),
        ),
        pareto_betas,
        pareto_modes,
        compare_controllers,
        perturb_window,
        perturb_delta_kmh: manifest.perturb.delta_kmh,
    })
}
