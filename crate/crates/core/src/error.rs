//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by the vehicle/powertrain model.
#[derive(Debug, Error)]
pub enum ModelError {
    /// The distance-domain model divides by v; it is singular at rest.
    #[error("speed must be strictly positive (got {speed} m/s)")]
    ZeroSpeed { speed: f64 },

    /// A step drove the speed below the model's validity floor.
    #[error("vehicle stalled: step drove speed to {next_speed} m/s (< {floor} m/s)")]
    StalledVehicle { next_speed: f64, floor: f64 },

    /// Kinetic energy at the current speed cannot supply the cranking energy.
    #[error("insufficient kinetic energy to restart the engine at {speed} m/s")]
    InsufficientKineticEnergy { speed: f64 },

    /// A control step violates its invariants.
    #[error("invalid control step: {what}")]
    InvalidControl { what: String },

    /// A parameter set violates its invariants.
    #[error("invalid parameters: {what}")]
    InvalidParams { what: String },
}

/// A model error annotated with the step index at which a rollout failed.
#[derive(Debug, Error)]
#[error("simulation failed at step {step}: {source}")]
pub struct SimulationError {
    pub step: usize,
    #[source]
    pub source: ModelError,
}

/// Errors raised by profile/trace/log readers and writers.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}:{line}: parse error: {what}")]
    Parse {
        path: String,
        line: usize,
        what: String,
    },

    #[error("validation error: {what}")]
    Validation { what: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Errors raised by the offline and online solvers.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("infeasible: {what}")]
    Infeasible { what: String },

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Simulation(#[from] SimulationError),
}
