//! Vehicle, powertrain, and operating-envelope parameters.
//!
//! All values are SI internally (m, m/s, N, Nm, J; fuel mass in grams).
//! km/h and degrees appear only at I/O boundaries.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// km/h -> m/s.
pub const KMH_TO_MPS: f64 = 1.0 / 3.6;
/// m/s -> km/h.
pub const MPS_TO_KMH: f64 = 3.6;

/// Physical and powertrain constants of the simulated vehicle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    /// Effective vehicle mass [kg].
    pub effective_mass: f64,
    /// Aerodynamic drag coefficient [-].
    pub drag_coeff: f64,
    /// Frontal projected area [m^2].
    pub frontal_area: f64,
    /// Air density [kg/m^3].
    pub air_density: f64,
    /// Rolling resistance coefficient [-].
    pub rolling_coeff: f64,
    /// Gravitational acceleration [m/s^2].
    pub gravity: f64,
    /// Gearbox efficiency, in (0, 1].
    pub gearbox_efficiency: f64,
    /// Wheel radius [m].
    pub wheel_radius: f64,
    /// Gearbox ratio of the (fixed, highest) gear [-].
    pub gear_ratio: f64,
    /// Final drive ratio [-].
    pub final_drive_ratio: f64,
    /// Engine drag torque transmitted through the engaged clutch during
    /// fuel cut-off [Nm].
    pub engine_drag_torque: f64,
    /// Engine rotational inertia [kg m^2].
    pub engine_inertia: f64,
    /// Fuel polynomial coefficients (alpha_1..alpha_4).
    pub fuel_coeffs: [f64; 4],
}

impl VehicleParams {
    /// Validate the physical invariants. Returns the params unchanged on
    /// success so construction sites can chain.
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("effective_mass", self.effective_mass),
            ("drag_coeff", self.drag_coeff),
            ("frontal_area", self.frontal_area),
            ("air_density", self.air_density),
            ("rolling_coeff", self.rolling_coeff),
            ("gravity", self.gravity),
            ("wheel_radius", self.wheel_radius),
            ("gear_ratio", self.gear_ratio),
            ("final_drive_ratio", self.final_drive_ratio),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ModelError::InvalidParams {
                    what: format!("{name} must be strictly positive (got {v})"),
                });
            }
        }
        if !(self.gearbox_efficiency > 0.0 && self.gearbox_efficiency <= 1.0) {
            return Err(ModelError::InvalidParams {
                what: format!(
                    "gearbox_efficiency must be in (0, 1] (got {})",
                    self.gearbox_efficiency
                ),
            });
        }
        if !(self.engine_drag_torque >= 0.0) {
            return Err(ModelError::InvalidParams {
                what: format!(
                    "engine_drag_torque must be >= 0 (got {})",
                    self.engine_drag_torque
                ),
            });
        }
        if !(self.engine_inertia >= 0.0) {
            return Err(ModelError::InvalidParams {
                what: format!("engine_inertia must be >= 0 (got {})", self.engine_inertia),
            });
        }
        Ok(())
    }

    /// Combined transmission ratio gearbox * final drive.
    pub fn total_ratio(&self) -> f64 {
        self.gear_ratio * self.final_drive_ratio
    }
}

impl Default for VehicleParams {
    /// Parameters of the 1870 kg SUV test vehicle.
    fn default() -> Self {
        Self {
            effective_mass: 1870.0,
            drag_coeff: 0.373,
            frontal_area: 2.58,
            air_density: 1.205,
            rolling_coeff: 0.011,
            gravity: 9.8,
            gearbox_efficiency: 0.94,
            wheel_radius: 0.364,
            gear_ratio: 0.672,
            final_drive_ratio: 4.103,
            engine_drag_torque: 30.0,
            engine_inertia: 0.15,
            fuel_coeffs: [0.2159, 0.005676, 0.0004349, 8.899e-7],
        }
    }
}

/// Box limits of the cruise optimization problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingLimits {
    /// Minimum cruise speed [m/s].
    pub v_min: f64,
    /// Maximum cruise speed [m/s].
    pub v_max: f64,
    /// Maximum engine torque [Nm].
    pub engine_torque_max: f64,
    /// Maximum brake torque [Nm].
    pub brake_torque_max: f64,
}

impl OperatingLimits {
    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.v_min > 0.0 && self.v_min < self.v_max) {
            return Err(ModelError::InvalidParams {
                what: format!(
                    "require 0 < v_min < v_max (got v_min={}, v_max={})",
                    self.v_min, self.v_max
                ),
            });
        }
        if !(self.engine_torque_max > 0.0 && self.brake_torque_max > 0.0) {
            return Err(ModelError::InvalidParams {
                what: "torque maxima must be strictly positive".to_string(),
            });
        }
        Ok(())
    }

    pub fn contains_speed(&self, v: f64) -> bool {
        v >= self.v_min && v <= self.v_max
    }
}

impl Default for OperatingLimits {
    /// Cruise envelope: 50-90 km/h, 120 Nm engine, 500 Nm brake.
    fn default() -> Self {
        Self {
            v_min: 50.0 * KMH_TO_MPS,
            v_max: 90.0 * KMH_TO_MPS,
            engine_torque_max: 120.0,
            brake_torque_max: 500.0,
        }
    }
}

/// Default initial and terminal cruise speed (75 km/h) [m/s].
pub fn default_initial_speed() -> f64 {
    75.0 * KMH_TO_MPS
}

/// Convention used to derive the locked-clutch engine speed from vehicle
/// speed for the restart-energy computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum EngineSpeedConvention {
    /// omega_e = I_g * I_final * v / r_w, in rad/s. Dimensionally consistent
    /// with the kinetic-energy balance.
    #[default]
    RadPerSec,
    /// omega_e = I_g * I_final * v / (2 pi r_w). Kept selectable for
    /// comparison against the alternative printed form.
    DividedByTwoPi,
}

/// Unit in which the rotational speed is fed to the fuel polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FuelSpeedUnit {
    /// Thousands of rpm. With the stock coefficients this yields physically
    /// plausible rates (idle 0.2159 g/s, ~0.8 g/s at 10 kW cruise) and is
    /// the default.
    #[default]
    KiloRpm,
    /// Plain rpm.
    Rpm,
    /// rad/s.
    RadPerSec,
}

/// How the per-step travel time is computed from the distance step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum StepTimeRule {
    /// dt = ds / v(k); consistent with the 1/v(k) travel-time stage cost.
    #[default]
    InverseEntrySpeed,
    /// dt = 2 ds / (v(k) + v(k+1)).
    Trapezoidal,
}

/// Model-level configuration switches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct ModelOptions {
    pub engine_speed_convention: EngineSpeedConvention,
    pub fuel_speed_unit: FuelSpeedUnit,
    pub step_time: StepTimeRule,
}
