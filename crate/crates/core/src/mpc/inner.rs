//! Inner continuous solver: projected gradient descent with Armijo
//! backtracking on the torque box, gradients via an analytic adjoint
//! sweep through the distance-domain rollout.
//!
//! With the binary sequence fixed, complementarity is handled by variable
//! elimination: an on-step optimizes engine torque (brake fixed 0), an
//! off-step optimizes brake torque (engine fixed 0), one variable per
//! step. Speed-box violations are charged through a quadratic penalty so
//! the problem stays smooth; the caller checks the residual violation.

use crate::model::{
    advance, fuel_engine_speed, resistance_force, restart_speed_drop, ControlStep,
    PowertrainMode,
};
use crate::profile::ScenarioSpec;

/// Weight on the quadratic speed-box penalty.
pub(crate) const BOX_PENALTY: f64 = 1e5;
/// Residual box violation tolerated after the penalized solve [m/s].
pub(crate) const BOX_VIOLATION_TOL: f64 = 1e-4;

pub(crate) trait BoxProblem {
    fn dim(&self) -> usize;
    fn project(&self, x: &mut [f64]);
    fn eval(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64], g: &mut [f64]);
}

pub(crate) struct PgdOutcome {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

/// Minimize a smooth objective over a box. Deterministic: fixed starting
/// point in, fixed iterate sequence out.
pub(crate) fn projected_gradient(
    problem: &impl BoxProblem,
    mut x: Vec<f64>,
    max_iter: usize,
    tol: f64,
) -> PgdOutcome {
    debug_assert_eq!(x.len(), problem.dim());
    problem.project(&mut x);
    if x.is_empty() {
        return PgdOutcome {
            objective: problem.eval(&x),
            x,
            iterations: 0,
        };
    }
    let mut objective = problem.eval(&x);
    let mut g = vec![0.0; x.len()];
    let mut step = 1.0f64;
    let mut iterations = 0;
    for _ in 0..max_iter {
        iterations += 1;
        problem.grad(&x, &mut g);
        let mut accepted = false;
        for _ in 0..60 {
            let mut candidate: Vec<f64> =
                x.iter().zip(&g).map(|(&xi, &gi)| xi - step * gi).collect();
            problem.project(&mut candidate);
            let decrease: f64 = g
                .iter()
                .zip(x.iter().zip(&candidate))
                .map(|(&gi, (&xi, &ci))| gi * (xi - ci))
                .sum();
            if decrease <= 0.0 {
                // Projected step points nowhere downhill: stationary.
                break;
            }
            let trial = problem.eval(&candidate);
            if trial <= objective - 1e-4 * decrease {
                let improvement = objective - trial;
                x = candidate;
                objective = trial;
                step = (step * 2.0).min(1e8);
                accepted = true;
                if improvement < tol {
                    return PgdOutcome {
                        x,
                        objective,
                        iterations,
                    };
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    PgdOutcome {
        x,
        objective,
        iterations,
    }
}

/// Fixed-binary horizon subproblem over one torque variable per step.
pub(crate) struct ContinuousHorizon<'a> {
    pub scenario: &'a ScenarioSpec,
    /// First profile step of the window.
    pub start: usize,
    pub binaries: &'a [u8],
    pub v_start: f64,
    /// Signal applied on the step before the window (restart seam).
    pub prev_signal: u8,
    /// Reference speed for each post-step state v(i+1).
    pub vref_next: &'a [f64],
}

impl ContinuousHorizon<'_> {
    pub fn len(&self) -> usize {
        self.binaries.len()
    }

    pub fn control(&self, i: usize, x_i: f64) -> ControlStep {
        if self.binaries[i] == 1 {
            ControlStep::drive(x_i)
        } else {
            ControlStep::coast(x_i)
        }
    }

    /// Forward rollout; None on stall.
    pub fn speeds(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s = self.scenario;
        let mut speeds = Vec::with_capacity(self.len() + 1);
        speeds.push(self.v_start);
        let mut v = self.v_start;
        let mut prev = self.prev_signal;
        for i in 0..self.len() {
            let control = self.control(i, x[i]);
            let out = advance(
                &s.vehicle,
                &s.options,
                s.mode,
                &control,
                prev,
                v,
                s.profile.grades[self.start + i],
                s.profile.step_length,
            )
            .ok()?;
            v = out.next_speed;
            prev = control.coast_signal;
            speeds.push(v);
        }
        Some(speeds)
    }

    fn box_penalty_terms(&self, v: f64) -> (f64, f64) {
        let ds = self.scenario.profile.step_length;
        let lo = (self.scenario.limits.v_min - v).max(0.0);
        let hi = (v - self.scenario.limits.v_max).max(0.0);
        let value = BOX_PENALTY * (lo * lo + hi * hi) * ds;
        let slope = BOX_PENALTY * (2.0 * hi - 2.0 * lo) * ds;
        (value, slope)
    }

    /// Objective including the box penalty, and the speed trajectory.
    pub fn objective_with_speeds(&self, x: &[f64]) -> Option<(f64, Vec<f64>)> {
        let s = self.scenario;
        let speeds = self.speeds(x)?;
        let beta = s.weights.beta;
        let ds = s.profile.step_length;
        let mut total = 0.0;
        let mut v = self.v_start;
        let mut prev = self.prev_signal;
        for i in 0..self.len() {
            let control = self.control(i, x[i]);
            let out = advance(
                &s.vehicle,
                &s.options,
                s.mode,
                &control,
                prev,
                v,
                s.profile.grades[self.start + i],
                ds,
            )
            .ok()?;
            let e = out.next_speed - self.vref_next[i];
            total += beta * out.fuel_used + (1.0 - beta) * e * e * ds;
            total += self.box_penalty_terms(out.next_speed).0;
            v = out.next_speed;
            prev = control.coast_signal;
        }
        Some((total, speeds))
    }

    /// Largest speed-box violation along the rollout [m/s].
    pub fn max_violation(&self, speeds: &[f64]) -> f64 {
        let lim = &self.scenario.limits;
        speeds[1..]
            .iter()
            .map(|&v| (lim.v_min - v).max(v - lim.v_max).max(0.0))
            .fold(0.0, f64::max)
    }
}

impl BoxProblem for ContinuousHorizon<'_> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn project(&self, x: &mut [f64]) {
        let lim = &self.scenario.limits;
        for (i, xi) in x.iter_mut().enumerate() {
            let hi = if self.binaries[i] == 1 {
                lim.engine_torque_max
            } else {
                lim.brake_torque_max
            };
            *xi = xi.clamp(0.0, hi);
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self.objective_with_speeds(x) {
            Some((j, _)) => j,
            None => f64::INFINITY,
        }
    }

    fn grad(&self, x: &[f64], g: &mut [f64]) {
        let s = self.scenario;
        let p = &s.vehicle;
        let n = self.len();
        let ds = s.profile.step_length;
        let beta = s.weights.beta;
        let gear = p.gearbox_efficiency * p.total_ratio();
        let m = p.effective_mass;
        // Fuel-polynomial engine speed per unit vehicle speed, and the
        // restart drop per unit speed (both linear in v).
        let omega_per_v = fuel_engine_speed(p, &s.options, 1.0);
        let drop_per_v = if s.mode == PowertrainMode::EngineStartStop {
            restart_speed_drop(p, &s.options, 1.0).unwrap_or(0.0)
        } else {
            0.0
        };
        let aero = p.drag_coeff * p.air_density * p.frontal_area;
        let [a1, a2, a3, a4] = p.fuel_coeffs;

        let speeds = match self.speeds(x) {
            Some(sp) => sp,
            None => {
                // Stalled rollout: push every variable toward traction.
                for (i, gi) in g.iter_mut().enumerate() {
                    *gi = if self.binaries[i] == 1 { -1.0 } else { 1.0 };
                }
                return;
            }
        };

        // Backward adjoint sweep. `lambda` is d(cost of steps > i)/d v(i+1).
        let mut lambda = 0.0;
        let prev_signal = |i: usize| -> u8 {
            if i == 0 {
                self.prev_signal
            } else {
                self.binaries[i - 1]
            }
        };
        for i in (0..n).rev() {
            let v = speeds[i];
            let v_next = speeds[i + 1];
            let grade = s.profile.grades[self.start + i];
            let on = self.binaries[i] == 1;
            let restart = s.mode == PowertrainMode::EngineStartStop
                && on
                && prev_signal(i) == 0;
            let control = self.control(i, x[i]);
            let traction =
                crate::model::final_drive_torque(p, s.mode, &control) / p.wheel_radius;
            let fr = resistance_force(p, grade, v);

            // dv(i+1)/dv(i) and dv(i+1)/dx(i).
            let a_i = 1.0 + (-aero * v / (m * v) - (traction - fr) / (m * v * v)) * ds
                - if restart { drop_per_v } else { 0.0 };
            let b_i = if on {
                gear / p.wheel_radius / (m * v) * ds
            } else {
                -1.0 / p.wheel_radius / (m * v) * ds
            };

            // Sensitivity of this step's post-state terms to v(i+1).
            let e = v_next - self.vref_next[i];
            let w = 2.0 * (1.0 - beta) * e * ds + self.box_penalty_terms(v_next).1 + lambda;

            // Fuel partials (zero on off-steps: no injection).
            let (fuel_x, fuel_v) = if on {
                let omega = omega_per_v * v;
                let te = x[i];
                let mdot = a1 + a2 * omega * te + a3 * omega * omega * te + a4 * omega * te * te;
                let dmdot_dte = a2 * omega + a3 * omega * omega + 2.0 * a4 * omega * te;
                let dmdot_domega = a2 * te + 2.0 * a3 * omega * te + a4 * te * te;
                let fuel_x = dmdot_dte * ds / v;
                let fuel_v = dmdot_domega * omega_per_v * ds / v - mdot * ds / (v * v);
                (fuel_x, fuel_v)
            } else {
                (0.0, 0.0)
            };

            g[i] = beta * fuel_x + w * b_i;
            lambda = beta * fuel_v + w * a_i;
        }
    }
}
