//! Rule-based baseline controller: PI speed tracking with a
//! threshold-triggered coast signal and a fixed hold.
//!
//! The PI output u is a final-drive force demand. Positive u maps to
//! engine torque through the drivetrain ratio, negative u to brake torque
//! at the wheel. The coast signal drops to 0 when the torque request
//! vanishes while the vehicle is faster than the trigger speed, and is
//! then held at 0 for a fixed number of steps; after the hold expires the
//! trigger is re-evaluated, so coasting phases can extend indefinitely.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SimulationError};
use crate::model::{advance, ControlStep, PowertrainMode};
use crate::params::{OperatingLimits, VehicleParams, KMH_TO_MPS};
use crate::profile::ScenarioSpec;
use crate::trajectory::{LogStep, TrajectoryLog};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiConfig {
    /// Proportional gain on the speed error [N per m/s].
    pub kp: f64,
    /// Integral gain [N per m].
    pub ki: f64,
    /// Coasting is only triggered above this speed [m/s].
    pub trigger_speed: f64,
    /// Steps the signal is held at 0 after a trigger.
    pub hold_steps: usize,
    pub mode: PowertrainMode,
}

impl PiConfig {
    /// Per-mode default gains, sized for the force demand a ~1900 kg
    /// vehicle needs (start/stop gets the stiffer loop: its coast phases
    /// decelerate less, so re-engagement corrections must act faster).
    pub fn for_mode(mode: PowertrainMode) -> Self {
        let (kp, ki) = match mode {
            PowertrainMode::EngineStartStop => (8000.0, 50.0),
            _ => (2000.0, 5.0),
        };
        Self {
            kp,
            ki,
            trigger_speed: 75.0 * KMH_TO_MPS,
            hold_steps: 4,
            mode,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.kp >= 0.0 && self.ki >= 0.0) {
            return Err(ModelError::InvalidParams {
                what: "PI gains must be non-negative".to_string(),
            });
        }
        if self.hold_steps < 1 {
            return Err(ModelError::InvalidParams {
                what: "hold_steps must be >= 1".to_string(),
            });
        }
        Ok(())
    }
}

impl Default for PiConfig {
    fn default() -> Self {
        Self::for_mode(PowertrainMode::FuelCutOff)
    }
}

/// Controller state threaded through a rollout.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PiState {
    /// Accumulated speed error integral [m/s · m].
    pub integral: f64,
    /// Remaining steps of a forced-off hold.
    pub hold_counter: usize,
}

/// One controller evaluation. Returns the control and the updated state;
/// the integral uses conditional integration (no accumulation while the
/// commanded actuator is saturated or suppressed by the hold).
pub fn pi_step(
    config: &PiConfig,
    vehicle: &VehicleParams,
    limits: &OperatingLimits,
    v: f64,
    v_ref: f64,
    state: PiState,
    step_length: f64,
) -> (ControlStep, PiState) {
    debug_assert!(v > 0.0);
    let e = v_ref - v;
    let u = config.kp * e + config.ki * state.integral;
    let gear = vehicle.gearbox_efficiency * vehicle.total_ratio();
    let torque_scale = vehicle.wheel_radius / gear;
    let brake_scale = vehicle.wheel_radius;

    let brake_for = |u: f64| (-u * brake_scale).clamp(0.0, limits.brake_torque_max);

    let (control, mut hold, suppressed) = if state.hold_counter > 0 {
        // Inside the hold: engine torque forced 0 regardless of u.
        let tb = if u <= 0.0 { brake_for(u) } else { 0.0 };
        (ControlStep::coast(tb), state.hold_counter - 1, u > 0.0)
    } else if u > 0.0 {
        let te = (u * torque_scale).clamp(0.0, limits.engine_torque_max);
        (ControlStep::drive(te), 0, false)
    } else if v > config.trigger_speed {
        // Torque request fell to zero above the trigger speed: coast and
        // start the hold (this step counts as the first of hold_steps).
        (ControlStep::coast(brake_for(u)), config.hold_steps - 1, false)
    } else {
        // Too slow to coast: stay fueled, brake as demanded.
        (
            ControlStep {
                engine_torque: 0.0,
                brake_torque: brake_for(u),
                coast_signal: 1,
            },
            0,
            false,
        )
    };

    // Conditional integration: freeze the integral when the actuator is
    // saturated in the error's direction or the hold suppresses it.
    let saturated_high = u > 0.0 && control.engine_torque >= limits.engine_torque_max && e > 0.0;
    let saturated_low = u <= 0.0 && control.brake_torque >= limits.brake_torque_max && e < 0.0;
    let mut integral = state.integral;
    if !(saturated_high || saturated_low || suppressed) {
        integral += e * step_length;
    }

    if control.coast_signal == 1 {
        hold = 0;
    }
    (
        control,
        PiState {
            integral,
            hold_counter: hold,
        },
    )
}

/// Closed-loop rollout of the PI controller over a scenario. Tracks the
/// reference trace; scenarios without one hold the initial speed.
pub fn pi_run(scenario: &ScenarioSpec, config: &PiConfig) -> Result<TrajectoryLog, SimulationError> {
    config
        .validate()
        .map_err(|source| SimulationError { step: 0, source })?;
    let ds = scenario.profile.step_length;
    let mut v = scenario.v0;
    let mut prev_signal = 1u8;
    let mut state = PiState::default();
    let mut steps = Vec::with_capacity(scenario.len());
    for k in 0..scenario.len() {
        let v_ref = match &scenario.reference {
            Some(r) => r.speeds[k.min(r.len() - 1)],
            None => scenario.v0,
        };
        let (control, next_state) =
            pi_step(config, &scenario.vehicle, &scenario.limits, v, v_ref, state, ds);
        let out = advance(
            &scenario.vehicle,
            &scenario.options,
            scenario.mode,
            &control,
            prev_signal,
            v,
            scenario.profile.grades[k],
            ds,
        )
        .map_err(|source| SimulationError { step: k, source })?;
        steps.push(LogStep {
            step: k,
            distance_m: k as f64 * ds,
            speed_mps: v,
            engine_torque_nm: control.engine_torque,
            brake_torque_nm: control.brake_torque,
            coast_signal: control.coast_signal,
            fuel_g: out.fuel_used,
            time_s: out.time_elapsed,
        });
        v = out.next_speed;
        prev_signal = control.coast_signal;
        state = next_state;
    }
    Ok(TrajectoryLog {
        steps,
        final_speed: v,
    })
}
