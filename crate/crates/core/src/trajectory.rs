//! Per-step simulation records and run summaries.

use serde::{Deserialize, Serialize};

use crate::profile::ReferenceTrace;

/// One row of a trajectory log. `speed_mps` is the speed at the start of
/// the step; `fuel_g` and `time_s` are that step's increments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogStep {
    pub step: usize,
    pub distance_m: f64,
    pub speed_mps: f64,
    pub engine_torque_nm: f64,
    pub brake_torque_nm: f64,
    pub coast_signal: u8,
    pub fuel_g: f64,
    pub time_s: f64,
}

/// Full closed-loop or open-loop rollout record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryLog {
    pub steps: Vec<LogStep>,
    /// Speed after the last step [m/s].
    pub final_speed: f64,
}

impl TrajectoryLog {
    pub fn total_fuel_g(&self) -> f64 {
        self.steps.iter().map(|s| s.fuel_g).sum()
    }

    pub fn total_time_s(&self) -> f64 {
        self.steps.iter().map(|s| s.time_s).sum()
    }

    /// Number of coast-signal transitions along the log.
    pub fn switch_count(&self) -> usize {
        self.steps
            .windows(2)
            .filter(|w| w[0].coast_signal != w[1].coast_signal)
            .count()
    }

    /// Coast-signal sequence, one entry per step.
    pub fn signals(&self) -> Vec<u8> {
        self.steps.iter().map(|s| s.coast_signal).collect()
    }

    /// RMS speed-tracking error against a reference trace [m/s].
    pub fn tracking_rmse(&self, reference: &ReferenceTrace) -> f64 {
        if self.steps.is_empty() {
            return 0.0;
        }
        let n = self.steps.len().min(reference.len());
        let sum: f64 = self.steps[..n]
            .iter()
            .zip(&reference.speeds[..n])
            .map(|(s, &r)| (s.speed_mps - r) * (s.speed_mps - r))
            .sum();
        (sum / n as f64).sqrt()
    }
}

/// JSON summary written next to each trajectory log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub fuel_g: f64,
    pub time_s: f64,
    pub tracking_rmse_mps: Option<f64>,
    pub switch_count: usize,
    pub solve_time_s_per_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fallback_count: Option<usize>,
}

impl RunSummary {
    /// Summary of a plain rollout with no solver statistics.
    pub fn from_log(log: &TrajectoryLog, reference: Option<&ReferenceTrace>) -> Self {
        Self {
            fuel_g: log.total_fuel_g(),
            time_s: log.total_time_s(),
            tracking_rmse_mps: reference.map(|r| log.tracking_rmse(r)),
            switch_count: log.switch_count(),
            solve_time_s_per_step: None,
            iterations: None,
            fallback_count: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(step: usize, signal: u8) -> LogStep {
        LogStep {
            step,
            distance_m: step as f64 * 5.0,
            speed_mps: 20.0,
            engine_torque_nm: 0.0,
            brake_torque_nm: 0.0,
            coast_signal: signal,
            fuel_g: 0.1,
            time_s: 0.25,
        }
    }

    #[test]
    fn switch_count_counts_transitions() {
        let log = TrajectoryLog {
            steps: vec![row(0, 1), row(1, 1), row(2, 0), row(3, 0), row(4, 1)],
            final_speed: 20.0,
        };
        assert_eq!(log.switch_count(), 2);
    }

    #[test]
    fn rmse_zero_on_exact_tracking() {
        let log = TrajectoryLog {
            steps: vec![row(0, 1), row(1, 1)],
            final_speed: 20.0,
        };
        let reference = ReferenceTrace::new(5.0, vec![20.0, 20.0]).unwrap();
        assert_eq!(log.tracking_rmse(&reference), 0.0);
    }
}
