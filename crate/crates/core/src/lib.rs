//! Spatial-domain vehicle and powertrain model for grade-aware coasting,
//! with offline dynamic programming, online mixed-integer MPC, and simple
//! baseline controllers.
//!
//! The distance axis is discretized at a fixed step length; every solver
//! and controller in this crate shares the single-track longitudinal model
//! in [`model`] so costs and trajectories are directly comparable.

pub mod dp;
pub mod error;
pub mod io;
pub mod model;
pub mod mpc;
pub mod params;
pub mod pi;
pub mod profile;
pub mod trajectory;

pub use dp::{dp_solve, dp_tracking_solve, pareto_sweep, CostWeights, DpGrid, DpOptions, DpSolution};
pub use error::{IoError, ModelError, SimulationError, SolveError};
pub use model::{advance, simulate, ControlStep, PowertrainMode, StepOutcome, SPEED_FLOOR};
pub use mpc::{
    evaluate_horizon, heuristic_mpc_run, mimpc_run, mimpc_step, min_off_constraints,
    satisfies_min_off, solve_continuous, BinaryHistory, ContinuousSolution, MinOffInequality,
    MpcConfig, SolveResult, SolveStatus, SolverKind,
};
pub use params::{
    ModelOptions, OperatingLimits, VehicleParams, KMH_TO_MPS, MPS_TO_KMH,
};
pub use pi::{pi_run, pi_step, PiConfig, PiState};
pub use profile::{synth_hill, ReferenceTrace, ScenarioSpec, SlopeProfile, DEFAULT_STEP_LENGTH};
pub use trajectory::{LogStep, RunSummary, TrajectoryLog};
