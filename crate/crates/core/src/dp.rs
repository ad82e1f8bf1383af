//! Offline global optimization by backward dynamic programming over a
//! distance-discretized, velocity-gridded state space.
//!
//! The state at each distance step is (speed, previous coast signal); the
//! previous signal is tracked exactly because both the FCO switch penalty
//! and the start/stop restart drop depend on it. Speed is interpolated
//! linearly in the cost-to-go.
//!
//! The forward pass follows one of two strategies:
//!
//! - `Greedy`: roll forward from v0 picking, at the actual (off-grid)
//!   speed, the action minimizing stage cost plus interpolated cost-to-go.
//!   Scales to long profiles and fine grids.
//! - `Exact`: depth-first search over the full control tree with sound
//!   pruning (speed box, terminal reachability bands, admissible
//!   remaining-cost bound against the incumbent). Returns the true optimum
//!   of the discretized problem; exponential worst case, so only viable on
//!   small instances.
//!
//! `Auto` (the default) picks `Exact` when the raw tree is small enough
//! and `Greedy` otherwise.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, SolveError};
use crate::model::{advance, simulate, ControlStep, PowertrainMode};
use crate::params::{OperatingLimits, KMH_TO_MPS};
use crate::profile::ScenarioSpec;
use crate::trajectory::TrajectoryLog;

/// Fuel vs. time/tracking trade-off weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostWeights {
    /// Weight on fuel, in [0, 1]; (1 - beta) weighs travel time or
    /// tracking error.
    pub beta: f64,
    /// Switch penalty weight for the fuel cut-off signal; >= 0. Unused by
    /// the other modes (the restart cost of start/stop lives in the
    /// dynamics).
    pub alpha: f64,
}

impl CostWeights {
    pub fn new(beta: f64, alpha: f64) -> Self {
        Self { beta, alpha }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(ModelError::InvalidParams {
                what: format!("beta must be in [0, 1] (got {})", self.beta),
            });
        }
        if !(self.alpha >= 0.0) {
            return Err(ModelError::InvalidParams {
                what: format!("alpha must be >= 0 (got {})", self.alpha),
            });
        }
        Ok(())
    }
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            beta: 0.5,
            alpha: 0.0,
        }
    }
}

/// Discretization grids for the DP state and action spaces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpGrid {
    /// Sorted speed nodes spanning [v_min, v_max] [m/s].
    pub speeds: Vec<f64>,
    /// Sorted engine torque nodes [Nm].
    pub engine_torques: Vec<f64>,
    /// Sorted brake torque nodes [Nm].
    pub brake_torques: Vec<f64>,
}

impl DpGrid {
    /// Default resolution: 81 speed points, 13 engine-torque points,
    /// 6 brake points over the operating envelope.
    pub fn default_for(limits: &OperatingLimits) -> Self {
        Self {
            speeds: linspace(limits.v_min, limits.v_max, 81),
            engine_torques: linspace(0.0, limits.engine_torque_max, 13),
            brake_torques: linspace(0.0, limits.brake_torque_max, 6),
        }
    }

    pub fn with_resolution(
        limits: &OperatingLimits,
        n_speeds: usize,
        n_torques: usize,
        n_brakes: usize,
    ) -> Self {
        Self {
            speeds: linspace(limits.v_min, limits.v_max, n_speeds),
            engine_torques: linspace(0.0, limits.engine_torque_max, n_torques),
            brake_torques: linspace(0.0, limits.brake_torque_max, n_brakes),
        }
    }

    pub fn validate(&self, limits: &OperatingLimits) -> Result<(), ModelError> {
        for (name, grid) in [
            ("speeds", &self.speeds),
            ("engine_torques", &self.engine_torques),
            ("brake_torques", &self.brake_torques),
        ] {
            if grid.len() < 2 {
                return Err(ModelError::InvalidParams {
                    what: format!("{name} grid needs >= 2 points"),
                });
            }
            if grid.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ModelError::InvalidParams {
                    what: format!("{name} grid must be strictly increasing"),
                });
            }
        }
        let (lo, hi) = (self.speeds[0], *self.speeds.last().unwrap());
        if lo < limits.v_min - 1e-9 || hi > limits.v_max + 1e-9 {
            return Err(ModelError::InvalidParams {
                what: "speed grid exceeds operating limits".to_string(),
            });
        }
        if *self.engine_torques.last().unwrap() > limits.engine_torque_max + 1e-9
            || *self.brake_torques.last().unwrap() > limits.brake_torque_max + 1e-9
        {
            return Err(ModelError::InvalidParams {
                what: "torque grid exceeds operating limits".to_string(),
            });
        }
        Ok(())
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Forward-pass strategy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum RolloutStrategy {
    /// Exact when the raw control tree is small enough, greedy otherwise.
    #[default]
    Auto,
    Greedy,
    Exact,
}

/// DP solver knobs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DpOptions {
    /// Half-width of the hard terminal speed window around v0 [m/s].
    pub terminal_window: f64,
    pub rollout: RolloutStrategy,
    /// Node budget for the exact search; when exceeded the best incumbent
    /// found so far is returned.
    pub exact_node_budget: u64,
}

impl Default for DpOptions {
    fn default() -> Self {
        Self {
            terminal_window: 0.5 * KMH_TO_MPS,
            rollout: RolloutStrategy::Auto,
            exact_node_budget: 50_000_000,
        }
    }
}

/// Offline solver output.
#[derive(Clone, Debug)]
pub struct DpSolution {
    pub controls: Vec<ControlStep>,
    pub trajectory: TrajectoryLog,
    pub total_cost: f64,
    pub fuel_g: f64,
    pub time_s: f64,
    pub switch_count: usize,
}

/// Which quantity the (1 - beta) term weighs.
#[derive(Clone, Copy, Debug)]
enum Objective<'a> {
    TravelTime,
    Tracking(&'a [f64]),
}

/// Minimize beta * fuel + (1 - beta) * travel time (plus the FCO switch
/// penalty) subject to the speed box and terminal window.
pub fn dp_solve(
    scenario: &ScenarioSpec,
    grid: &DpGrid,
    options: &DpOptions,
) -> Result<DpSolution, SolveError> {
    solve(scenario, grid, options, Objective::TravelTime)
}

/// Minimize beta * fuel + (1 - beta) * squared tracking error against the
/// scenario's reference trace.
pub fn dp_tracking_solve(
    scenario: &ScenarioSpec,
    grid: &DpGrid,
    options: &DpOptions,
) -> Result<DpSolution, SolveError> {
    let reference = scenario.reference.as_ref().ok_or_else(|| SolveError::Infeasible {
        what: "tracking objective requires a reference trace".to_string(),
    })?;
    solve(scenario, grid, options, Objective::Tracking(&reference.speeds))
}

/// One point of a Pareto sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParetoPoint {
    pub beta: f64,
    /// None when the solve was infeasible at this beta.
    pub summary: Option<ParetoSummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ParetoSummary {
    pub fuel_g: f64,
    pub time_s: f64,
    pub switch_count: usize,
}

/// Solve the travel-time objective once per beta. Infeasible points are
/// recorded, not fatal. Points are independent and solved in parallel.
pub fn pareto_sweep(
    scenario: &ScenarioSpec,
    grid: &DpGrid,
    options: &DpOptions,
    betas: &[f64],
) -> Vec<ParetoPoint> {
    use rayon::prelude::*;
    let mut points: Vec<ParetoPoint> = betas
        .par_iter()
        .map(|&beta| {
            let mut s = scenario.clone();
            s.weights.beta = beta;
            let summary = dp_solve(&s, grid, options).ok().map(|sol| ParetoSummary {
                fuel_g: sol.fuel_g,
                time_s: sol.time_s,
                switch_count: sol.switch_count,
            });
            ParetoPoint { beta, summary }
        })
        .collect();
    points.sort_by(|a, b| a.beta.partial_cmp(&b.beta).unwrap());
    points
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

/// Candidate actions at one step, in tie-break preference order:
/// higher signal first, then lower engine torque, then lower brake torque.
fn actions(mode: PowertrainMode, grid: &DpGrid) -> Vec<ControlStep> {
    let mut out = Vec::new();
    match mode {
        PowertrainMode::Baseline => {
            for &te in &grid.engine_torques {
                out.push(ControlStep::drive(te));
            }
            for &tb in &grid.brake_torques {
                if tb > 0.0 {
                    out.push(ControlStep::brake_on(tb));
                }
            }
        }
        PowertrainMode::FuelCutOff | PowertrainMode::EngineStartStop => {
            for &te in &grid.engine_torques {
                out.push(ControlStep::drive(te));
            }
            for &tb in &grid.brake_torques {
                out.push(ControlStep::coast(tb));
            }
        }
    }
    out
}

struct Problem<'a> {
    scenario: &'a ScenarioSpec,
    grid: &'a DpGrid,
    options: &'a DpOptions,
    actions: Vec<ControlStep>,
    objective_is_tracking: bool,
    reference: Vec<f64>,
    n_signals: usize,
    /// Terminal-reachability speed band per step boundary (len n + 1):
    /// speeds outside `[reach_lo[k], reach_hi[k]]` cannot reach the
    /// terminal window from step k under any control.
    reach_lo: Vec<f64>,
    reach_hi: Vec<f64>,
}

impl<'a> Problem<'a> {
    fn new(
        scenario: &'a ScenarioSpec,
        grid: &'a DpGrid,
        options: &'a DpOptions,
        objective: Objective<'_>,
    ) -> Self {
        let (objective_is_tracking, reference) = match objective {
            Objective::TravelTime => (false, Vec::new()),
            Objective::Tracking(r) => (true, r.to_vec()),
        };
        let mut p = Self {
            scenario,
            grid,
            options,
            actions: actions(scenario.mode, grid),
            objective_is_tracking,
            reference,
            n_signals: if scenario.mode.is_binary() { 2 } else { 1 },
            reach_lo: Vec::new(),
            reach_hi: Vec::new(),
        };
        let (lo, hi) = reach_bands(&p);
        p.reach_lo = lo;
        p.reach_hi = hi;
        p
    }

    /// Stage cost given the step outcome. Tracking error is charged on the
    /// post-step speed against the next step's reference entry.
    fn stage_cost(
        &self,
        k: usize,
        prev_signal: u8,
        control: &ControlStep,
        fuel: f64,
        dt: f64,
        next_speed: f64,
    ) -> f64 {
        let w = &self.scenario.weights;
        let ds = self.scenario.profile.step_length;
        let mut cost = w.beta * fuel;
        if self.objective_is_tracking {
            let idx = (k + 1).min(self.reference.len() - 1);
            let e = next_speed - self.reference[idx];
            cost += (1.0 - w.beta) * e * e * ds;
        } else {
            cost += (1.0 - w.beta) * dt;
        }
        if self.scenario.mode == PowertrainMode::FuelCutOff {
            let dz = f64::from(control.coast_signal) - f64::from(prev_signal);
            cost += w.alpha * ds * dz * dz;
        }
        cost
    }

    /// Step the dynamics and compute the stage cost; None when the action
    /// is infeasible (stall or speed box violation).
    fn transition(
        &self,
        k: usize,
        speed: f64,
        prev_signal: u8,
        control: &ControlStep,
    ) -> Option<(f64, f64)> {
        let s = self.scenario;
        let out = advance(
            &s.vehicle,
            &s.options,
            s.mode,
            control,
            prev_signal,
            speed,
            s.profile.grades[k],
            s.profile.step_length,
        )
        .ok()?;
        if out.next_speed < s.limits.v_min || out.next_speed > s.limits.v_max {
            return None;
        }
        if out.next_speed < self.reach_lo[k + 1] || out.next_speed > self.reach_hi[k + 1] {
            return None;
        }
        let cost = self.stage_cost(
            k,
            prev_signal,
            control,
            out.fuel_used,
            out.time_elapsed,
            out.next_speed,
        );
        Some((out.next_speed, cost))
    }

    fn terminal_ok(&self, v: f64) -> bool {
        (v - self.scenario.v0).abs() <= self.options.terminal_window
    }

    /// Linear interpolation of a value row at an off-grid speed.
    ///
    /// A cell with exactly one infinite endpoint straddles the boundary of
    /// the terminal-reachability corridor; the boundary's true position
    /// inside the cell is unknown, and when the one-step speed change is
    /// smaller than a grid cell, treating the whole cell as infeasible
    /// erodes the corridor by a full cell per stage until it vanishes. Fall
    /// back to the finite endpoint's value there; the speed box itself is
    /// enforced by pruning actions before they reach this lookup.
    fn interp(&self, row: &[f64], v: f64) -> f64 {
        let speeds = &self.grid.speeds;
        if v <= speeds[0] {
            return row[0];
        }
        let last = speeds.len() - 1;
        if v >= speeds[last] {
            return row[last];
        }
        let i = match speeds.binary_search_by(|x| x.partial_cmp(&v).unwrap()) {
            Ok(i) => return row[i],
            Err(i) => i - 1,
        };
        let (a, b) = (row[i], row[i + 1]);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => {
                let frac = (v - speeds[i]) / (speeds[i + 1] - speeds[i]);
                a + (b - a) * frac
            }
            (true, false) => a,
            (false, true) => b,
            (false, false) => f64::INFINITY,
        }
    }
}

/// One-step extremal speed changes at speed v on a grade: hardest braking
/// and full engine torque. The maximum gain deliberately ignores the
/// start/stop restart drop: a state reached with the engine already on
/// pays no drop, and the bands must never exclude a feasible trajectory.
fn dv_extremes(s: &ScenarioSpec, grade: f64, v: f64) -> (f64, f64) {
    let p = &s.vehicle;
    let ds = s.profile.step_length;
    let gear = p.gearbox_efficiency * p.total_ratio();
    let ft_max = gear * s.limits.engine_torque_max / p.wheel_radius;
    let drag = if s.mode == PowertrainMode::FuelCutOff {
        gear * p.engine_drag_torque / p.wheel_radius
    } else {
        0.0
    };
    let ft_min = -(s.limits.brake_torque_max / p.wheel_radius + drag);
    let fr = crate::model::resistance_force(p, grade, v);
    let dv_max = (ft_max - fr) / (p.effective_mass * v) * ds;
    let dv_min = (ft_min - fr) / (p.effective_mass * v) * ds;
    (dv_min, dv_max)
}

/// Terminal-reachability speed bands, computed backward from the terminal
/// window with the one-step extremal speed changes. The band at step k is
/// an outer approximation of the set of speeds from which the window can
/// still be reached; the dynamics are control-affine in the torques, so
/// the one-step reachable set really is the interval between the extremes.
/// Each edge solves x + dv(x) = band[k + 1] by a short fixed-point
/// iteration (dv varies slowly in v) and backs off by a small margin so
/// the bands never exclude a feasible trajectory.
fn reach_bands(p: &Problem) -> (Vec<f64>, Vec<f64>) {
    const MARGIN: f64 = 1e-7;
    let s = p.scenario;
    let n = s.len();
    let (vmin, vmax) = (s.limits.v_min, s.limits.v_max);
    let mut lo = vec![vmin; n + 1];
    let mut hi = vec![vmax; n + 1];
    lo[n] = (s.v0 - p.options.terminal_window).max(vmin);
    hi[n] = (s.v0 + p.options.terminal_window).min(vmax);
    for k in (0..n).rev() {
        let grade = s.profile.grades[k];
        let mut x = lo[k + 1];
        for _ in 0..3 {
            let (_, up) = dv_extremes(s, grade, x.clamp(vmin, vmax));
            x = lo[k + 1] - up;
        }
        lo[k] = (x - MARGIN).clamp(vmin, vmax);
        let mut y = hi[k + 1];
        for _ in 0..3 {
            let (down, _) = dv_extremes(s, grade, y.clamp(vmin, vmax));
            y = hi[k + 1] - down;
        }
        hi[k] = (y + MARGIN).clamp(vmin, vmax);
    }
    (lo, hi)
}

/// Backward value tables: `value[k][p * n_speeds + s]` is the cost-to-go at
/// the start of step k from speed node s with previous signal p.
///
/// The terminal window is evaluated exactly on the continuous post-step
/// speed of the last stage rather than through a node-indicator row: the
/// window is about one grid cell wide, so interpolating an indicator would
/// collapse the feasible terminal set to the exact v0 node.
fn backward_values(p: &Problem) -> Vec<Vec<f64>> {
    let n = p.scenario.len();
    let n_s = p.grid.speeds.len();
    let width = n_s * p.n_signals;

    let mut value = vec![vec![f64::INFINITY; width]; n];
    for k in (0..n).rev() {
        let (head, tail) = value.split_at_mut(k + 1);
        let cur = &mut head[k];
        let next = tail.first();
        for prev in 0..p.n_signals {
            // For non-binary modes the single signal slot means "on".
            let prev_signal = if p.n_signals == 1 { 1 } else { prev as u8 };
            for (s, &v) in p.grid.speeds.iter().enumerate() {
                let mut best = f64::INFINITY;
                for action in &p.actions {
                    let Some((v_next, stage)) = p.transition(k, v, prev_signal, action) else {
                        continue;
                    };
                    let tail_cost = match next {
                        Some(row) => {
                            let slot = if p.n_signals == 1 {
                                0
                            } else {
                                action.coast_signal as usize
                            };
                            p.interp(&row[slot * n_s..(slot + 1) * n_s], v_next)
                        }
                        None if p.terminal_ok(v_next) => 0.0,
                        None => f64::INFINITY,
                    };
                    let total = stage + tail_cost;
                    if total < best {
                        best = total;
                    }
                }
                cur[prev * n_s + s] = best;
            }
        }
    }
    value
}

/// Greedy forward pass: at the actual speed, pick the action minimizing
/// stage + interpolated cost-to-go. Interpolation error near the
/// feasibility boundary can steer the pass into a dead end, so the pass
/// backtracks: actions are tried in value order and the first control
/// sequence that completes inside the terminal window is returned.
fn greedy_rollout(p: &Problem, value: &[Vec<f64>]) -> Result<(Vec<ControlStep>, f64), SolveError> {
    let n = p.scenario.len();
    let n_s = p.grid.speeds.len();

    struct Rollout<'a, 'b> {
        p: &'a Problem<'b>,
        value: &'a [Vec<f64>],
        controls: Vec<ControlStep>,
        nodes: usize,
        budget: usize,
    }

    impl Rollout<'_, '_> {
        fn dfs(&mut self, k: usize, speed: f64, prev_signal: u8) -> Option<f64> {
            let n = self.p.scenario.len();
            let n_s = self.p.grid.speeds.len();
            if k == n {
                return if n == 0 || self.p.terminal_ok(speed) {
                    Some(0.0)
                } else {
                    None
                };
            }
            if self.nodes >= self.budget {
                return None;
            }
            self.nodes += 1;
            let mut ranked: Vec<(f64, f64, f64, ControlStep)> = Vec::new();
            for action in &self.p.actions {
                let Some((v_next, stage)) = self.p.transition(k, speed, prev_signal, action)
                else {
                    continue;
                };
                let tail = if k + 1 == n {
                    if self.p.terminal_ok(v_next) {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    let slot = if self.p.n_signals == 1 {
                        0
                    } else {
                        action.coast_signal as usize
                    };
                    self.p
                        .interp(&self.value[k + 1][slot * n_s..(slot + 1) * n_s], v_next)
                };
                let total = stage + tail;
                if total.is_finite() {
                    ranked.push((total, stage, v_next, *action));
                }
            }
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
            for (_, stage, v_next, action) in ranked {
                self.controls.push(action);
                if let Some(tail) = self.dfs(k + 1, v_next, action.coast_signal) {
                    return Some(stage + tail);
                }
                self.controls.pop();
            }
            None
        }
    }

    let mut r = Rollout {
        p,
        value,
        controls: Vec::with_capacity(n),
        nodes: 0,
        // Generous headroom over the greedy path; blowing through it means
        // the value tables are badly misleading and the run should fail.
        budget: 200 * n.max(1) * n_s,
    };
    match r.dfs(0, p.scenario.v0, 1) {
        Some(cost) => Ok((r.controls, cost)),
        None => Err(SolveError::Infeasible {
            what: "rollout found no control sequence reaching the terminal window".to_string(),
        }),
    }
}

/// Exact depth-first search over the control tree. Returns the optimal
/// control sequence and cost, or the incumbent if the node budget runs out.
fn exact_search(
    p: &Problem,
    incumbent: Option<(Vec<ControlStep>, f64)>,
) -> Result<(Vec<ControlStep>, f64), SolveError> {
    let n = p.scenario.len();

    // Admissible lower bound on the remaining cost from step k.
    let ds = p.scenario.profile.step_length;
    let mut lb = vec![0.0; n + 1];
    for k in (0..n).rev() {
        let stage_min = if p.objective_is_tracking {
            0.0
        } else {
            (1.0 - p.scenario.weights.beta) * ds / p.scenario.limits.v_max
        };
        lb[k] = lb[k + 1] + stage_min;
    }

    struct Search<'a, 'b> {
        p: &'a Problem<'b>,
        lb: Vec<f64>,
        best_cost: f64,
        best: Option<Vec<ControlStep>>,
        stack: Vec<ControlStep>,
        nodes: u64,
        budget: u64,
    }

    impl Search<'_, '_> {
        fn dfs(&mut self, k: usize, speed: f64, prev_signal: u8, cost: f64) {
            if self.nodes >= self.budget {
                return;
            }
            self.nodes += 1;
            let n = self.p.scenario.len();
            if k == n {
                if self.p.terminal_ok(speed) && cost < self.best_cost {
                    self.best_cost = cost;
                    self.best = Some(self.stack.clone());
                }
                return;
            }
            if speed < self.p.reach_lo[k] || speed > self.p.reach_hi[k] {
                return;
            }
            if cost + self.lb[k] >= self.best_cost {
                return;
            }
            // Actions are already in tie-break preference order.
            for i in 0..self.p.actions.len() {
                let action = self.p.actions[i];
                let Some((v_next, stage)) = self.p.transition(k, speed, prev_signal, &action)
                else {
                    continue;
                };
                self.stack.push(action);
                self.dfs(k + 1, v_next, action.coast_signal, cost + stage);
                self.stack.pop();
            }
        }
    }

    let mut search = Search {
        p,
        lb,
        best_cost: incumbent.as_ref().map_or(f64::INFINITY, |(_, c)| *c),
        best: None,
        stack: Vec::with_capacity(n),
        nodes: 0,
        budget: p.options.exact_node_budget,
    };
    search.dfs(0, p.scenario.v0, 1, 0.0);

    match (search.best, incumbent) {
        (Some(controls), _) => Ok((controls, search.best_cost)),
        (None, Some(inc)) => Ok(inc),
        (None, None) => Err(SolveError::Infeasible {
            what: "no control sequence reaches the terminal window".to_string(),
        }),
    }
}

/// Whether the raw control tree is small enough for the exact search.
fn exact_applicable(p: &Problem) -> bool {
    let n = p.scenario.len() as f64;
    let a = p.actions.len() as f64;
    n * a.ln() <= 1e9_f64.ln()
}

fn solve(
    scenario: &ScenarioSpec,
    grid: &DpGrid,
    options: &DpOptions,
    objective: Objective<'_>,
) -> Result<DpSolution, SolveError> {
    scenario
        .validate()
        .map_err(|e| SolveError::Infeasible { what: e.to_string() })?;
    grid.validate(&scenario.limits)?;
    if let (Objective::Tracking(r), true) = (&objective, scenario.len() > 0) {
        assert!(r.len() >= scenario.len(), "reference shorter than profile");
    }

    let p = Problem::new(scenario, grid, options, objective);
    if scenario.is_empty() {
        return Ok(DpSolution {
            controls: vec![],
            trajectory: TrajectoryLog {
                steps: vec![],
                final_speed: scenario.v0,
            },
            total_cost: 0.0,
            fuel_g: 0.0,
            time_s: 0.0,
            switch_count: 0,
        });
    }

    let value = backward_values(&p);
    let greedy = greedy_rollout(&p, &value);

    let use_exact = match options.rollout {
        RolloutStrategy::Greedy => false,
        RolloutStrategy::Exact => true,
        RolloutStrategy::Auto => exact_applicable(&p),
    };

    let (controls, total_cost) = if use_exact {
        exact_search(&p, greedy.ok())?
    } else {
        greedy?
    };

    let trajectory = simulate(
        &scenario.vehicle,
        &scenario.options,
        scenario.mode,
        &scenario.profile,
        &controls,
        scenario.v0,
        1,
    )?;
    Ok(DpSolution {
        fuel_g: trajectory.total_fuel_g(),
        time_s: trajectory.total_time_s(),
        switch_count: trajectory.switch_count(),
        controls,
        trajectory,
        total_cost,
    })
}
