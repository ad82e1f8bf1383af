//! Spatial-domain longitudinal vehicle, drivetrain, and fuel models for the
//! three coasting mechanisms. Single source of truth for the dynamics used
//! by every solver in this crate.
//!
//! The vehicle is discretized in the distance domain with step `ds`:
//!
//! ```text
//! v(k+1) = v(k) + (F_t - F_r) / (m_eff v(k)) * ds - dv_restart(k)
//! ```
//!
//! where `F_t` is the traction force implied by the final driveshaft torque
//! and `dv_restart` is the speed drop paid when the engine start/stop
//! mechanism cranks the engine back on from vehicle kinetic energy.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SimulationError};
use crate::params::{
    EngineSpeedConvention, FuelSpeedUnit, ModelOptions, StepTimeRule, VehicleParams,
};
use crate::profile::SlopeProfile;
use crate::trajectory::{LogStep, TrajectoryLog};

/// The distance-domain model divides by v; below this floor a step is
/// treated as a stall rather than clamped.
pub const SPEED_FLOOR: f64 = 1.0;

/// Coasting mechanism under simulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PowertrainMode {
    /// Engine always on, clutch engaged; no coasting mechanism.
    Baseline,
    /// Fuel injection cut with the clutch engaged; the engine imposes a
    /// drag torque on the driveline while the signal is 0.
    FuelCutOff,
    /// Engine off with the lock-up clutch disengaged; no drag torque, but
    /// restarting consumes vehicle kinetic energy.
    EngineStartStop,
}

impl PowertrainMode {
    /// Whether the mode carries a free binary coast signal.
    pub fn is_binary(self) -> bool {
        !matches!(self, PowertrainMode::Baseline)
    }
}

/// Per-step control decision.
///
/// `coast_signal` is the FCO signal z or the start/stop signal d; it is
/// fixed at 1 for the baseline. Complementarity: signal 0 forces zero
/// engine torque, signal 1 forces zero brake torque.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlStep {
    pub engine_torque: f64,
    pub brake_torque: f64,
    pub coast_signal: u8,
}

impl ControlStep {
    /// Engine-on step with the given engine torque.
    pub fn drive(engine_torque: f64) -> Self {
        Self {
            engine_torque,
            brake_torque: 0.0,
            coast_signal: 1,
        }
    }

    /// Engine-on step with the given brake torque.
    ///
    /// Braking with the signal at 1 is only valid for the baseline mode;
    /// the binary modes brake with the signal at 0.
    pub fn brake_on(brake_torque: f64) -> Self {
        Self {
            engine_torque: 0.0,
            brake_torque,
            coast_signal: 1,
        }
    }

    /// Coasting step (signal 0), optionally braking.
    pub fn coast(brake_torque: f64) -> Self {
        Self {
            engine_torque: 0.0,
            brake_torque,
            coast_signal: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.engine_torque >= 0.0) || !(self.brake_torque >= 0.0) {
            return Err(ModelError::InvalidControl {
                what: format!(
                    "torques must be non-negative (T_e={}, T_b={})",
                    self.engine_torque, self.brake_torque
                ),
            });
        }
        if self.coast_signal > 1 {
            return Err(ModelError::InvalidControl {
                what: format!("coast_signal must be 0 or 1 (got {})", self.coast_signal),
            });
        }
        if self.coast_signal == 0 && self.engine_torque != 0.0 {
            return Err(ModelError::InvalidControl {
                what: "engine torque must be zero while the coast signal is 0".to_string(),
            });
        }
        if self.coast_signal == 1 && self.brake_torque != 0.0 && self.engine_torque != 0.0 {
            return Err(ModelError::InvalidControl {
                what: "engine and brake torque must not be non-zero simultaneously".to_string(),
            });
        }
        Ok(())
    }
}

/// Result of advancing one distance step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepOutcome {
    /// Speed at the start of the next step [m/s].
    pub next_speed: f64,
    /// Fuel burned over the step [g].
    pub fuel_used: f64,
    /// Time spent on the step [s].
    pub time_elapsed: f64,
    /// Speed drop paid for an engine restart this step [m/s]; zero unless
    /// a restart occurred.
    pub restart_speed_drop: f64,
}

/// Total rolling + grade + aerodynamic resistance force [N].
pub fn resistance_force(params: &VehicleParams, grade: f64, speed: f64) -> f64 {
    params.effective_mass
        * params.gravity
        * (grade.sin() + params.rolling_coeff * grade.cos())
        + 0.5 * params.drag_coeff * params.air_density * params.frontal_area * speed * speed
}

/// Final driveshaft torque [Nm] for the given mode and control.
///
/// With the signal at 0 the fuel cut-off mode drags the driveline through
/// the engaged clutch; start/stop disengages the clutch and sees no drag.
pub fn final_drive_torque(params: &VehicleParams, mode: PowertrainMode, step: &ControlStep) -> f64 {
    let gear = params.gearbox_efficiency * params.total_ratio();
    match mode {
        PowertrainMode::Baseline | PowertrainMode::EngineStartStop => {
            gear * step.engine_torque - step.brake_torque
        }
        PowertrainMode::FuelCutOff => {
            let drag = (1.0 - f64::from(step.coast_signal)) * params.engine_drag_torque;
            gear * (step.engine_torque - drag) - step.brake_torque
        }
    }
}

/// Instantaneous fuel mass rate [g/s] of the fitted engine polynomial.
///
/// The polynomial is treated as a black box: `engine_speed` must be in the
/// unit the coefficients were fitted for (see [`FuelSpeedUnit`]).
pub fn fuel_rate(params: &VehicleParams, engine_speed: f64, engine_torque: f64) -> f64 {
    let [a1, a2, a3, a4] = params.fuel_coeffs;
    let w = engine_speed;
    let t = engine_torque;
    a1 + a2 * w * t + a3 * w * w * t + a4 * w * t * t
}

/// Locked-clutch engine speed [rad/s by default] implied by vehicle speed.
pub fn engine_speed_from_vehicle_speed(
    params: &VehicleParams,
    opts: &ModelOptions,
    speed: f64,
) -> f64 {
    let base = params.total_ratio() * speed / params.wheel_radius;
    match opts.engine_speed_convention {
        EngineSpeedConvention::RadPerSec => base,
        EngineSpeedConvention::DividedByTwoPi => base / (2.0 * std::f64::consts::PI),
    }
}

/// Engine speed in the unit expected by the fuel polynomial.
pub(crate) fn fuel_engine_speed(params: &VehicleParams, opts: &ModelOptions, speed: f64) -> f64 {
    // The locked-clutch kinematics are always rad/s; the polynomial input
    // unit is a separate choice.
    let rad_per_sec = params.total_ratio() * speed / params.wheel_radius;
    let rpm = rad_per_sec * 60.0 / (2.0 * std::f64::consts::PI);
    match opts.fuel_speed_unit {
        FuelSpeedUnit::KiloRpm => rpm / 1000.0,
        FuelSpeedUnit::Rpm => rpm,
        FuelSpeedUnit::RadPerSec => rad_per_sec,
    }
}

/// Fuel burned over one distance step [g].
///
/// Exactly zero while the coast signal is 0: fuel cut-off injects nothing
/// and start/stop has the engine off entirely.
pub fn step_fuel(
    params: &VehicleParams,
    opts: &ModelOptions,
    _mode: PowertrainMode,
    step: &ControlStep,
    speed: f64,
    step_length: f64,
) -> Result<f64, ModelError> {
    if !(speed > 0.0) {
        return Err(ModelError::ZeroSpeed { speed });
    }
    if step.coast_signal == 0 {
        return Ok(0.0);
    }
    let omega = fuel_engine_speed(params, opts, speed);
    Ok(fuel_rate(params, omega, step.engine_torque) / speed * step_length)
}

/// Cranking energy [J] needed to spin the engine up to the synchronization
/// speed implied by the current vehicle speed.
pub fn restart_energy(params: &VehicleParams, opts: &ModelOptions, speed: f64) -> f64 {
    let omega = engine_speed_from_vehicle_speed(params, opts, speed);
    0.5 * params.engine_inertia * omega * omega
}

/// Speed drop dv >= 0 such that the vehicle kinetic-energy decrease exactly
/// supplies the cranking energy:
/// `0.5 m_eff (v^2 - (v - dv)^2) = 0.5 I_engine omega_e(v)^2`.
pub fn restart_speed_drop(
    params: &VehicleParams,
    opts: &ModelOptions,
    speed: f64,
) -> Result<f64, ModelError> {
    if !(speed > 0.0) {
        return Err(ModelError::ZeroSpeed { speed });
    }
    if params.engine_inertia == 0.0 {
        return Ok(0.0);
    }
    let delta_e = restart_energy(params, opts, speed);
    let remaining = speed * speed - 2.0 * delta_e / params.effective_mass;
    if remaining < 0.0 {
        return Err(ModelError::InsufficientKineticEnergy { speed });
    }
    Ok(speed - remaining.sqrt())
}

/// Advance the vehicle one distance step.
///
/// `prev_signal` is the coast signal applied on the previous step; a 0 -> 1
/// transition in start/stop mode pays the restart speed drop.
#[allow(clippy::too_many_arguments)]
pub fn advance(
    params: &VehicleParams,
    opts: &ModelOptions,
    mode: PowertrainMode,
    step: &ControlStep,
    prev_signal: u8,
    speed: f64,
    grade: f64,
    step_length: f64,
) -> Result<StepOutcome, ModelError> {
    if !(speed > 0.0) {
        return Err(ModelError::ZeroSpeed { speed });
    }
    let traction = final_drive_torque(params, mode, step) / params.wheel_radius;
    let resistance = resistance_force(params, grade, speed);
    let restart = mode == PowertrainMode::EngineStartStop
        && step.coast_signal == 1
        && prev_signal == 0;
    let drop = if restart {
        restart_speed_drop(params, opts, speed)?
    } else {
        0.0
    };
    let next_speed = speed
        + (traction - resistance) / (params.effective_mass * speed) * step_length
        - drop;
    if next_speed < SPEED_FLOOR {
        return Err(ModelError::StalledVehicle {
            next_speed,
            floor: SPEED_FLOOR,
        });
    }
    let time_elapsed = match opts.step_time {
        StepTimeRule::InverseEntrySpeed => step_length / speed,
        StepTimeRule::Trapezoidal => 2.0 * step_length / (speed + next_speed),
    };
    let fuel_used = step_fuel(params, opts, mode, step, speed, step_length)?;
    Ok(StepOutcome {
        next_speed,
        fuel_used,
        time_elapsed,
        restart_speed_drop: drop,
    })
}

/// Roll a control sequence out over a slope profile.
///
/// `controls` must be as long as the profile. Halts with the failing step
/// index on the first infeasible step.
pub fn simulate(
    params: &VehicleParams,
    opts: &ModelOptions,
    mode: PowertrainMode,
    profile: &SlopeProfile,
    controls: &[ControlStep],
    v0: f64,
    initial_signal: u8,
) -> Result<TrajectoryLog, SimulationError> {
    assert_eq!(
        controls.len(),
        profile.len(),
        "control sequence length must match the profile"
    );
    let mut steps = Vec::with_capacity(controls.len());
    let mut speed = v0;
    let mut prev_signal = initial_signal;
    for (k, (control, &grade)) in controls.iter().zip(profile.grades.iter()).enumerate() {
        let outcome = advance(
            params,
            opts,
            mode,
            control,
            prev_signal,
            speed,
            grade,
            profile.step_length,
        )
        .map_err(|source| SimulationError { step: k, source })?;
        steps.push(LogStep {
            step: k,
            distance_m: k as f64 * profile.step_length,
            speed_mps: speed,
            engine_torque_nm: control.engine_torque,
            brake_torque_nm: control.brake_torque,
            coast_signal: control.coast_signal,
            fuel_g: outcome.fuel_used,
            time_s: outcome.time_elapsed,
        });
        speed = outcome.next_speed;
        prev_signal = control.coast_signal;
    }
    Ok(TrajectoryLog {
        steps,
        final_speed: speed,
    })
}
