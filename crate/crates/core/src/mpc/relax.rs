//! Continuous relaxation of the mixed-integer horizon problem for branch
//! & bound lower bounds.
//!
//! The binaries enter the dynamics linearly wherever they appear: the fuel
//! cut-off drag torque scales with (1 - z), fuel flow is gated by z, and
//! the start/stop restart drop is gated by max(0, z(i) - z(i-1)) — the
//! lower envelope of the boolean transition indicator, so a constant
//! fractional z does not pay spurious partial restarts. At integer z the
//! relaxed rollout reproduces the plant model exactly, so relaxation
//! objectives and integer-leaf objectives are directly comparable.
//!
//! Complementarity is relaxed to the coupled box T_e ∈ [0, z·T_e,max],
//! T_b ∈ [0, (1-z)·T_b,max]; projection clamps z first, then the torques.

use crate::model::{
    fuel_engine_speed, resistance_force, restart_speed_drop, PowertrainMode, SPEED_FLOOR,
};
use crate::profile::ScenarioSpec;

use super::inner::{projected_gradient, BoxProblem, PgdOutcome, BOX_PENALTY};

/// Horizon subproblem with relaxed binaries; three variables per step,
/// laid out `[te(i), tb(i), z(i)]` per step.
pub(crate) struct RelaxedHorizon<'a> {
    pub scenario: &'a ScenarioSpec,
    pub start: usize,
    pub v_start: f64,
    /// Signal applied before the window, as a constant z(-1).
    pub prev_signal: f64,
    pub vref_next: &'a [f64],
    /// Per-step bounds on z; fixed binaries have lo == hi.
    pub z_lo: &'a [f64],
    pub z_hi: &'a [f64],
}

impl RelaxedHorizon<'_> {
    pub fn len(&self) -> usize {
        self.z_lo.len()
    }

    fn drop_per_v(&self) -> f64 {
        if self.scenario.mode == PowertrainMode::EngineStartStop {
            restart_speed_drop(&self.scenario.vehicle, &self.scenario.options, 1.0).unwrap_or(0.0)
        } else {
            0.0
        }
    }

    fn drag_torque(&self) -> f64 {
        if self.scenario.mode == PowertrainMode::FuelCutOff {
            self.scenario.vehicle.engine_drag_torque
        } else {
            0.0
        }
    }

    /// Relaxed forward rollout; None on stall.
    pub fn speeds(&self, x: &[f64]) -> Option<Vec<f64>> {
        let s = self.scenario;
        let p = &s.vehicle;
        let ds = s.profile.step_length;
        let gear = p.gearbox_efficiency * p.total_ratio();
        let drop_per_v = self.drop_per_v();
        let drag = self.drag_torque();
        let mut speeds = Vec::with_capacity(self.len() + 1);
        speeds.push(self.v_start);
        let mut v = self.v_start;
        let mut z_prev = self.prev_signal;
        for i in 0..self.len() {
            let (te, tb, z) = (x[3 * i], x[3 * i + 1], x[3 * i + 2]);
            let traction = (gear * (te - (1.0 - z) * drag) - tb) / p.wheel_radius;
            let fr = resistance_force(p, s.profile.grades[self.start + i], v);
            let drop = drop_per_v * v * (z - z_prev).max(0.0);
            let v_next = v + (traction - fr) / (p.effective_mass * v) * ds - drop;
            if v_next < SPEED_FLOOR {
                return None;
            }
            speeds.push(v_next);
            v = v_next;
            z_prev = z;
        }
        Some(speeds)
    }

    /// Fuel + tracking value at x with the speed-box penalty excluded:
    /// the quantity directly comparable with integer-leaf objectives.
    pub fn objective_without_penalty(&self, x: &[f64]) -> f64 {
        let Some(speeds) = self.speeds(x) else {
            return f64::INFINITY;
        };
        let mut total = self.eval(x);
        for &v in &speeds[1..] {
            total -= self.penalty(v).0;
        }
        total
    }

    fn penalty(&self, v: f64) -> (f64, f64) {
        let ds = self.scenario.profile.step_length;
        let lo = (self.scenario.limits.v_min - v).max(0.0);
        let hi = (v - self.scenario.limits.v_max).max(0.0);
        (
            BOX_PENALTY * (lo * lo + hi * hi) * ds,
            BOX_PENALTY * (2.0 * hi - 2.0 * lo) * ds,
        )
    }
}

impl BoxProblem for RelaxedHorizon<'_> {
    fn dim(&self) -> usize {
        3 * self.len()
    }

    fn project(&self, x: &mut [f64]) {
        let lim = &self.scenario.limits;
        for i in 0..self.len() {
            let z = x[3 * i + 2].clamp(self.z_lo[i], self.z_hi[i]);
            x[3 * i + 2] = z;
            x[3 * i] = x[3 * i].clamp(0.0, z * lim.engine_torque_max);
            x[3 * i + 1] = x[3 * i + 1].clamp(0.0, (1.0 - z) * lim.brake_torque_max);
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let s = self.scenario;
        let Some(speeds) = self.speeds(x) else {
            return f64::INFINITY;
        };
        let beta = s.weights.beta;
        let ds = s.profile.step_length;
        let omega_per_v = fuel_engine_speed(&s.vehicle, &s.options, 1.0);
        let [a1, a2, a3, a4] = s.vehicle.fuel_coeffs;
        let mut total = 0.0;
        for i in 0..self.len() {
            let (te, z) = (x[3 * i], x[3 * i + 2]);
            let v = speeds[i];
            let omega = omega_per_v * v;
            let mdot = a1 + a2 * omega * te + a3 * omega * omega * te + a4 * omega * te * te;
            total += beta * z * mdot * ds / v;
            let e = speeds[i + 1] - self.vref_next[i];
            total += (1.0 - beta) * e * e * ds + self.penalty(speeds[i + 1]).0;
        }
        total
    }

    fn grad(&self, x: &[f64], g: &mut [f64]) {
        let s = self.scenario;
        let p = &s.vehicle;
        let ds = s.profile.step_length;
        let beta = s.weights.beta;
        let gear = p.gearbox_efficiency * p.total_ratio();
        let m = p.effective_mass;
        let omega_per_v = fuel_engine_speed(p, &s.options, 1.0);
        let drop_per_v = self.drop_per_v();
        let drag = self.drag_torque();
        let aero = p.drag_coeff * p.air_density * p.frontal_area;
        let [a1, a2, a3, a4] = p.fuel_coeffs;

        g.iter_mut().for_each(|gi| *gi = 0.0);
        let Some(speeds) = self.speeds(x) else {
            for i in 0..self.len() {
                g[3 * i] = -1.0;
                g[3 * i + 1] = 1.0;
                g[3 * i + 2] = -1.0;
            }
            return;
        };

        let mut lambda = 0.0;
        for i in (0..self.len()).rev() {
            let (te, tb, z) = (x[3 * i], x[3 * i + 1], x[3 * i + 2]);
            let z_prev = if i == 0 {
                self.prev_signal
            } else {
                x[3 * (i - 1) + 2]
            };
            let v = speeds[i];
            let v_next = speeds[i + 1];
            let traction = (gear * (te - (1.0 - z) * drag) - tb) / p.wheel_radius;
            let fr = resistance_force(p, s.profile.grades[self.start + i], v);

            let restarting = z > z_prev;
            let dv_dte = gear / p.wheel_radius / (m * v) * ds;
            let dv_dtb = -1.0 / p.wheel_radius / (m * v) * ds;
            let dv_dz = gear * drag / p.wheel_radius / (m * v) * ds
                - if restarting { drop_per_v * v } else { 0.0 };
            let dv_dzprev = if restarting { drop_per_v * v } else { 0.0 };
            let dv_dv = 1.0 + (-aero / m - (traction - fr) / (m * v * v)) * ds
                - drop_per_v * (z - z_prev).max(0.0);

            let e = v_next - self.vref_next[i];
            let w = 2.0 * (1.0 - beta) * e * ds + self.penalty(v_next).1 + lambda;

            let omega = omega_per_v * v;
            let mdot = a1 + a2 * omega * te + a3 * omega * omega * te + a4 * omega * te * te;
            let dmdot_dte = a2 * omega + a3 * omega * omega + 2.0 * a4 * omega * te;
            let dmdot_domega = a2 * te + 2.0 * a3 * omega * te + a4 * te * te;
            let fuel_te = z * dmdot_dte * ds / v;
            let fuel_z = mdot * ds / v;
            let fuel_v = z * (dmdot_domega * omega_per_v * ds / v - mdot * ds / (v * v));

            g[3 * i] += beta * fuel_te + w * dv_dte;
            g[3 * i + 1] += w * dv_dtb;
            g[3 * i + 2] += beta * fuel_z + w * dv_dz;
            if i > 0 {
                g[3 * (i - 1) + 2] += w * dv_dzprev;
            }
            lambda = beta * fuel_v + w * dv_dv;
        }
    }
}

/// The relaxed problem in unit-box coordinates: torques divided by their
/// maxima so all variables share the z scale. The mixed natural scales
/// (torques up to 500, z up to 1) otherwise stall the projected gradient
/// far from stationarity.
struct Scaled<'a, 'b>(&'b RelaxedHorizon<'a>);

impl Scaled<'_, '_> {
    fn unscale(&self, y: &[f64]) -> Vec<f64> {
        let lim = &self.0.scenario.limits;
        let mut x = y.to_vec();
        for i in 0..self.0.len() {
            x[3 * i] *= lim.engine_torque_max;
            x[3 * i + 1] *= lim.brake_torque_max;
        }
        x
    }
}

impl BoxProblem for Scaled<'_, '_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn project(&self, y: &mut [f64]) {
        for i in 0..self.0.len() {
            let z = y[3 * i + 2].clamp(self.0.z_lo[i], self.0.z_hi[i]);
            y[3 * i + 2] = z;
            y[3 * i] = y[3 * i].clamp(0.0, z);
            y[3 * i + 1] = y[3 * i + 1].clamp(0.0, 1.0 - z);
        }
    }

    fn eval(&self, y: &[f64]) -> f64 {
        self.0.eval(&self.unscale(y))
    }

    fn grad(&self, y: &[f64], g: &mut [f64]) {
        let lim = &self.0.scenario.limits;
        self.0.grad(&self.unscale(y), g);
        for i in 0..self.0.len() {
            g[3 * i] *= lim.engine_torque_max;
            g[3 * i + 1] *= lim.brake_torque_max;
        }
    }
}

/// Solve the relaxation from a set of deterministic starting points (in
/// natural units) and keep the best local solution. Returns (variables,
/// objective) in natural units.
pub(crate) fn solve_relaxation(
    problem: &RelaxedHorizon,
    starts: &[Vec<f64>],
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let scaled = Scaled(problem);
    let lim = &problem.scenario.limits;
    let mut best: Option<PgdOutcome> = None;
    for x0 in starts {
        let mut y0 = x0.clone();
        for i in 0..problem.len() {
            y0[3 * i] /= lim.engine_torque_max;
            y0[3 * i + 1] /= lim.brake_torque_max;
        }
        let out = projected_gradient(&scaled, y0, max_iter, 1e-9);
        if best.as_ref().map_or(true, |b| out.objective < b.objective) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one start");
    (scaled.unscale(&best.x), best.objective)
}

/// Canonical relaxation start: mid-bound z, speed-holding engine torque,
/// zero brake.
pub(crate) fn canonical_relaxed_start(problem: &RelaxedHorizon) -> Vec<f64> {
    let s = problem.scenario;
    let p = &s.vehicle;
    let gear = p.gearbox_efficiency * p.total_ratio();
    let mut x = Vec::with_capacity(3 * problem.len());
    for i in 0..problem.len() {
        let fr = resistance_force(p, s.profile.grades[problem.start + i], problem.v_start);
        let te_eq = (fr * p.wheel_radius / gear).clamp(0.0, s.limits.engine_torque_max);
        x.push(te_eq);
        x.push(0.0);
        x.push(0.5 * (problem.z_lo[i] + problem.z_hi[i]));
    }
    x
}
