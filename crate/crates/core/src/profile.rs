//! Slope profiles, reference-speed traces, and scenario assembly.

use serde::{Deserialize, Serialize};

use crate::dp::CostWeights;
use crate::error::IoError;
use crate::model::PowertrainMode;
use crate::params::{ModelOptions, OperatingLimits, VehicleParams};

/// Default discretization distance [m].
pub const DEFAULT_STEP_LENGTH: f64 = 5.0;

/// Distance-indexed road grade, uniformly spaced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeProfile {
    /// Discretization distance [m].
    pub step_length: f64,
    /// Road grade angle [rad], one entry per step.
    pub grades: Vec<f64>,
}

impl SlopeProfile {
    /// Build a profile, checking the invariants. The empty profile is
    /// permitted (zero-length scenario).
    pub fn new(step_length: f64, grades: Vec<f64>) -> Result<Self, IoError> {
        if !(step_length > 0.0) {
            return Err(IoError::Validation {
                what: format!("step_length must be positive (got {step_length})"),
            });
        }
        if let Some(&g) = grades
            .iter()
            .find(|g| !g.is_finite() || g.abs() >= std::f64::consts::FRAC_PI_2)
        {
            return Err(IoError::Validation {
                what: format!("grade {g} rad out of range (|grade| < pi/2)"),
            });
        }
        Ok(Self { step_length, grades })
    }

    pub fn len(&self) -> usize {
        self.grades.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grades.is_empty()
    }

    /// Total profile length [m].
    pub fn total_length(&self) -> f64 {
        self.len() as f64 * self.step_length
    }

    /// Resample to a different step length by linear interpolation of the
    /// grade between step midpoints. The caller is expected to warn the
    /// user; spacing conversion is lossy.
    pub fn resampled(&self, step_length: f64) -> Result<Self, IoError> {
        if !(step_length > 0.0) {
            return Err(IoError::Validation {
                what: format!("step_length must be positive (got {step_length})"),
            });
        }
        if self.is_empty() || step_length == self.step_length {
            return Self::new(step_length, self.grades.clone());
        }
        let total = self.total_length();
        let n = (total / step_length).round().max(1.0) as usize;
        let grades = (0..n)
            .map(|i| {
                // Sample at the midpoint of the new step.
                let s = (i as f64 + 0.5) * step_length;
                self.grade_at(s)
            })
            .collect();
        Self::new(step_length, grades)
    }

    /// Grade at an arbitrary distance, interpolating linearly between the
    /// midpoints of the original steps and clamping at the ends.
    fn grade_at(&self, s: f64) -> f64 {
        let x = s / self.step_length - 0.5;
        if x <= 0.0 {
            return self.grades[0];
        }
        let last = self.grades.len() - 1;
        if x >= last as f64 {
            return self.grades[last];
        }
        let i = x.floor() as usize;
        let frac = x - i as f64;
        self.grades[i] * (1.0 - frac) + self.grades[i + 1] * frac
    }
}

/// Symmetric uphill-then-downhill profile: constant `+peak_grade` over the
/// first half, `-peak_grade` over the second half.
pub fn synth_hill(length: f64, peak_grade: f64, step_length: f64) -> SlopeProfile {
    assert!(length > 0.0 && step_length > 0.0);
    let n = (length / step_length).round().max(2.0) as usize;
    let half = n / 2;
    let grades = (0..n)
        .map(|i| if i < half { peak_grade } else { -peak_grade })
        .collect();
    SlopeProfile {
        step_length,
        grades,
    }
}

/// Distance-indexed reference speed, paired with a slope profile.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReferenceTrace {
    /// Discretization distance [m]; must match the paired profile.
    pub step_length: f64,
    /// Reference speed [m/s], one entry per step.
    pub speeds: Vec<f64>,
}

impl ReferenceTrace {
    pub fn new(step_length: f64, speeds: Vec<f64>) -> Result<Self, IoError> {
        if !(step_length > 0.0) {
            return Err(IoError::Validation {
                what: format!("step_length must be positive (got {step_length})"),
            });
        }
        Ok(Self { step_length, speeds })
    }

    pub fn len(&self) -> usize {
        self.speeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.speeds.is_empty()
    }

    /// Check every speed against the operating envelope.
    pub fn validate_limits(&self, limits: &OperatingLimits) -> Result<(), IoError> {
        for (i, &v) in self.speeds.iter().enumerate() {
            if !limits.contains_speed(v) {
                return Err(IoError::Validation {
                    what: format!(
                        "reference speed {v} m/s at step {i} outside [{}, {}] m/s",
                        limits.v_min, limits.v_max
                    ),
                });
            }
        }
        Ok(())
    }
}

/// A fully-specified simulation/optimization scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub vehicle: VehicleParams,
    pub options: ModelOptions,
    pub profile: SlopeProfile,
    pub reference: Option<ReferenceTrace>,
    /// Initial (and, for the offline solvers, terminal) speed [m/s].
    pub v0: f64,
    pub mode: PowertrainMode,
    pub weights: CostWeights,
    pub limits: OperatingLimits,
}

impl ScenarioSpec {
    /// Validate cross-field consistency. No partially valid scenario
    /// escapes this check.
    pub fn validate(&self) -> Result<(), IoError> {
        self.vehicle
            .validate()
            .map_err(|e| IoError::Validation { what: e.to_string() })?;
        self.limits
            .validate()
            .map_err(|e| IoError::Validation { what: e.to_string() })?;
        self.weights
            .validate()
            .map_err(|e| IoError::Validation { what: e.to_string() })?;
        if !self.limits.contains_speed(self.v0) {
            return Err(IoError::Validation {
                what: format!(
                    "v0 = {} m/s outside [{}, {}] m/s",
                    self.v0, self.limits.v_min, self.limits.v_max
                ),
            });
        }
        if let Some(reference) = &self.reference {
            if reference.len() < self.profile.len() {
                return Err(IoError::Validation {
                    what: format!(
                        "reference trace ({} steps) shorter than profile ({} steps)",
                        reference.len(),
                        self.profile.len()
                    ),
                });
            }
            if (reference.step_length - self.profile.step_length).abs() > 1e-9 {
                return Err(IoError::Validation {
                    what: format!(
                        "reference step length {} != profile step length {}",
                        reference.step_length, self.profile.step_length
                    ),
                });
            }
            reference.validate_limits(&self.limits)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.profile.len()
    }

    pub fn is_empty(&self) -> bool {
        self.profile.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hill_has_zero_net_elevation() {
        let p = synth_hill(1000.0, 2.0_f64.to_radians(), 5.0);
        assert_eq!(p.len(), 200);
        let sum: f64 = p.grades.iter().sum();
        assert!(sum.abs() < 1e-12);
    }

    #[test]
    fn hill_piecewise_constant_halves() {
        let peak = 2.0_f64.to_radians();
        let p = synth_hill(1000.0, peak, 5.0);
        for (i, &g) in p.grades.iter().enumerate() {
            if i < 100 {
                assert_eq!(g, peak, "step {i}");
            } else {
                assert_eq!(g, -peak, "step {i}");
            }
        }
    }

    #[test]
    fn flat_hill_is_all_zero() {
        let p = synth_hill(1000.0, 0.0, 5.0);
        assert_eq!(p.len(), 200);
        assert!(p.grades.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn profile_rejects_vertical_grade() {
        assert!(SlopeProfile::new(5.0, vec![std::f64::consts::FRAC_PI_2]).is_err());
    }

    #[test]
    fn resample_preserves_constant_profile() {
        let p = SlopeProfile::new(5.0, vec![0.02; 100]).unwrap();
        let r = p.resampled(2.0).unwrap();
        assert_eq!(r.len(), 250);
        assert!(r.grades.iter().all(|&g| (g - 0.02).abs() < 1e-12));
    }

    #[test]
    fn scenario_rejects_short_reference() {
        let scenario = ScenarioSpec {
            vehicle: VehicleParams::default(),
            options: ModelOptions::default(),
            profile: synth_hill(1000.0, 0.01, 5.0),
            reference: Some(ReferenceTrace::new(5.0, vec![20.0; 100]).unwrap()),
            v0: 75.0 / 3.6,
            mode: PowertrainMode::Baseline,
            weights: CostWeights::default(),
            limits: OperatingLimits::default(),
        };
        assert!(scenario.validate().is_err());
    }

    #[test]
    fn scenario_rejects_out_of_band_v0() {
        let scenario = ScenarioSpec {
            vehicle: VehicleParams::default(),
            options: ModelOptions::default(),
            profile: synth_hill(100.0, 0.0, 5.0),
            reference: None,
            v0: 95.0 / 3.6,
            mode: PowertrainMode::Baseline,
            weights: CostWeights::default(),
            limits: OperatingLimits::default(),
        };
        assert!(scenario.validate().is_err());
    }
}
