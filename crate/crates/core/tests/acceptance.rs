//! End-to-end acceptance checks. Each test prints a single PASS line on
//! success (run with `--nocapture` to see them); failures panic with
//! context.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use ecocoast_core::dp::{CostWeights, DpGrid, DpOptions, RolloutStrategy};
use ecocoast_core::*;

const DS: f64 = 5.0;

fn scenario(
    mode: PowertrainMode,
    profile: SlopeProfile,
    v0_kmh: f64,
    reference_kmh: Option<f64>,
    weights: CostWeights,
) -> ScenarioSpec {
    let n = profile.len();
    ScenarioSpec {
        vehicle: VehicleParams::default(),
        options: ModelOptions::default(),
        reference: reference_kmh
            .map(|r| ReferenceTrace::new(DS, vec![r * KMH_TO_MPS; n]).unwrap()),
        profile,
        v0: v0_kmh * KMH_TO_MPS,
        mode,
        weights,
        limits: OperatingLimits::default(),
    }
}

/// Exhaustive-enumeration oracle for the offline solver: depth-first over
/// the full action tree with only feasibility pruning and an admissible
/// travel-time bound. Independent of the solver's value tables and bands.
mod oracle {
    use super::*;

    pub fn actions(mode: PowertrainMode, grid: &DpGrid) -> Vec<ControlStep> {
        let mut out = Vec::new();
        for &te in &grid.engine_torques {
            out.push(ControlStep::drive(te));
        }
        for &tb in &grid.brake_torques {
            if mode.is_binary() {
                out.push(ControlStep::coast(tb));
            } else if tb > 0.0 {
                out.push(ControlStep::brake_on(tb));
            }
        }
        out
    }

    /// Re-simulate a control sequence through the plant and price it the
    /// way the travel-time objective does. None if it stalls, leaves the
    /// speed box, or misses the terminal window.
    pub fn resimulate(s: &ScenarioSpec, controls: &[ControlStep], window: f64) -> Option<f64> {
        let mut v = s.v0;
        let mut prev = 1u8;
        let mut cost = 0.0;
        for (k, a) in controls.iter().enumerate() {
            let out = advance(
                &s.vehicle,
                &s.options,
                s.mode,
                a,
                prev,
                v,
                s.profile.grades[k],
                DS,
            )
            .ok()?;
            if out.next_speed < s.limits.v_min || out.next_speed > s.limits.v_max {
                return None;
            }
            cost += s.weights.beta * out.fuel_used
                + (1.0 - s.weights.beta) * out.time_elapsed;
            if s.mode == PowertrainMode::FuelCutOff {
                let dz = f64::from(a.coast_signal) - f64::from(prev);
                cost += s.weights.alpha * DS * dz * dz;
            }
            v = out.next_speed;
            prev = a.coast_signal;
        }
        ((v - s.v0).abs() <= window).then_some(cost)
    }

    /// Exhaustive optimum, optionally seeded with an incumbent cost that
    /// tightens the pruning without excluding strictly better sequences.
    pub fn best_cost(
        s: &ScenarioSpec,
        grid: &DpGrid,
        window: f64,
        incumbent: Option<f64>,
    ) -> Option<f64> {
        let acts = actions(s.mode, grid);
        let mut best = incumbent.unwrap_or(f64::INFINITY);
        // Admissible remaining-cost bound: each step costs at least the
        // minimum possible time term (zero for tracking runs).
        let lb_per_step = (1.0 - s.weights.beta) * DS / s.limits.v_max;
        fn dfs(
            s: &ScenarioSpec,
            acts: &[ControlStep],
            window: f64,
            lb_per_step: f64,
            k: usize,
            v: f64,
            prev: u8,
            cost: f64,
            best: &mut f64,
        ) {
            let n = s.len();
            if cost + lb_per_step * (n - k) as f64 >= *best {
                return;
            }
            if k == n {
                if (v - s.v0).abs() <= window {
                    *best = cost;
                }
                return;
            }
            for a in acts {
                let Ok(out) = advance(
                    &s.vehicle,
                    &s.options,
                    s.mode,
                    a,
                    prev,
                    v,
                    s.profile.grades[k],
                    DS,
                ) else {
                    continue;
                };
                if out.next_speed < s.limits.v_min || out.next_speed > s.limits.v_max {
                    continue;
                }
                let mut stage = s.weights.beta * out.fuel_used
                    + (1.0 - s.weights.beta) * out.time_elapsed;
                if s.mode == PowertrainMode::FuelCutOff {
                    let dz = f64::from(a.coast_signal) - f64::from(prev);
                    stage += s.weights.alpha * DS * dz * dz;
                }
                dfs(
                    s,
                    acts,
                    window,
                    lb_per_step,
                    k + 1,
                    out.next_speed,
                    a.coast_signal,
                    cost + stage,
                    best,
                );
            }
        }
        dfs(s, &acts, window, lb_per_step, 0, s.v0, 1, 0.0, &mut best);
        if best.is_finite() {
            Some(best)
        } else {
            None
        }
    }
}

/// 1. Offline DP equals exhaustive enumeration on small instances.
#[test]
fn acceptance_1_dp_matches_exhaustive_enumeration() {
    let start = std::time::Instant::now();
    let limits = OperatingLimits::default();
    let grid = DpGrid::with_resolution(&limits, 5, 3, 3);
    let options = DpOptions {
        rollout: RolloutStrategy::Exact,
        exact_node_budget: 2_000_000_000,
        ..DpOptions::default()
    };

    let cases: Vec<(u64, PowertrainMode)> = (0..12u64)
        .flat_map(|seed| {
            [
                (seed, PowertrainMode::FuelCutOff),
                (seed, PowertrainMode::EngineStartStop),
            ]
        })
        .collect();

    let outcomes: Vec<(bool, bool)> = cases
        .par_iter()
        .map(|&(seed, mode)| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xD0 + seed);
            let grades: Vec<f64> = (0..10)
                .map(|_| rng.gen_range(-1.2f64..1.2).to_radians())
                .collect();
            let profile = SlopeProfile::new(DS, grades).unwrap();
            let v0 = rng.gen_range(65.0..85.0);
            let beta = rng.gen_range(0.2..0.8);
            let alpha = if mode == PowertrainMode::FuelCutOff && seed % 3 == 0 {
                0.004
            } else {
                0.0
            };
            let s = scenario(mode, profile, v0, None, CostWeights::new(beta, alpha));
            let window = options.terminal_window;
            match dp_solve(&s, &grid, &options) {
                Ok(sol) => {
                    let tol = 1e-12 * (1.0 + sol.total_cost.abs());
                    // The reported cost must be achieved by the reported
                    // controls under an independent re-simulation...
                    let achieved = oracle::resimulate(&s, &sol.controls, window)
                        .unwrap_or_else(|| {
                            panic!("seed {seed} {mode:?}: dp controls are infeasible")
                        });
                    let achieves = (achieved - sol.total_cost).abs() <= tol;
                    // ...and the exhaustive search, seeded just below it,
                    // must not find anything strictly better.
                    let best = oracle::best_cost(&s, &grid, window, Some(sol.total_cost - tol))
                        .unwrap();
                    (true, achieves && best >= sol.total_cost - tol)
                }
                Err(_) => {
                    let expected = oracle::best_cost(&s, &grid, window, None);
                    assert!(
                        expected.is_none(),
                        "seed {seed} {mode:?}: dp infeasible but enumeration found {expected:?}"
                    );
                    (false, true)
                }
            }
        })
        .collect();

    let feasible = outcomes.iter().filter(|(f, _)| *f).count();
    assert!(
        feasible >= 20,
        "only {feasible} feasible comparisons (need >= 20)"
    );
    for (i, (_, ok)) in outcomes.iter().enumerate() {
        assert!(*ok, "case {i}: dp cost != enumeration");
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "ran {elapsed:.1} s (budget 60 s)");
    println!(
        "ACCEPTANCE 1 PASS: dp == exhaustive enumeration on {feasible} feasible \
         random instances (of {}), {elapsed:.1} s",
        outcomes.len()
    );
}

/// 2. Start/stop coasting Pareto-dominates fuel cut-off on the synthetic
/// hill.
#[test]
fn acceptance_2_start_stop_dominates_fuel_cut_off() {
    let start = std::time::Instant::now();
    let limits = OperatingLimits::default();
    let grid = DpGrid::default_for(&limits);
    let options = DpOptions::default();
    let betas: Vec<f64> = (1..10).map(|i| i as f64 / 10.0).collect();
    // The cut-off points come from the standard nine-beta sweep; the
    // start/stop front is sampled densely so the comparison tests front
    // domination rather than the alignment of two coarse samplings.
    let ess_betas: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();

    let sweep = |mode: PowertrainMode, betas: &[f64]| -> Vec<(f64, f64)> {
        let s = scenario(
            mode,
            synth_hill(1000.0, 2.0f64.to_radians(), DS),
            75.0,
            None,
            CostWeights::default(),
        );
        pareto_sweep(&s, &grid, &options, betas)
            .into_iter()
            .filter_map(|p| p.summary.map(|s| (s.fuel_g, s.time_s)))
            .collect()
    };
    let fco = &sweep(PowertrainMode::FuelCutOff, &betas);
    let ess = &sweep(PowertrainMode::EngineStartStop, &ess_betas);
    assert!(!fco.is_empty() && !ess.is_empty(), "empty front");

    let mut strict = false;
    for &(f_fuel, f_time) in fco {
        let dominated = ess.iter().any(|&(e_fuel, e_time)| {
            e_fuel <= f_fuel + 1e-12 && e_time <= f_time + 1e-12
        });
        assert!(
            dominated,
            "fuel cut-off point (fuel {f_fuel:.3} g, time {f_time:.3} s) undominated"
        );
        strict |= ess.iter().any(|&(e_fuel, e_time)| {
            e_fuel <= f_fuel && e_time <= f_time && (e_fuel < f_fuel - 1e-9 || e_time < f_time - 1e-9)
        });
    }
    assert!(strict, "no strict domination found");
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 600.0, "ran {elapsed:.1} s (budget 600 s)");
    println!(
        "ACCEPTANCE 2 PASS: start/stop front weakly dominates fuel cut-off at all \
         {} betas with strict domination, {elapsed:.1} s",
        fco.len()
    );
}

/// 5. Restart speed drop conserves kinetic energy against the engine
/// cranking energy at 1000 random speeds.
#[test]
fn acceptance_5_restart_energy_conservation() {
    let p = VehicleParams::default();
    let o = ModelOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xE5);
    for _ in 0..1000 {
        let v = rng.gen_range(50.0..90.0) * KMH_TO_MPS;
        let drop = model::restart_speed_drop(&p, &o, v).unwrap();
        let v_after = v - drop;
        let kinetic_lost = 0.5 * p.effective_mass * (v * v - v_after * v_after);
        // Independent recomputation of the cranking energy from raw
        // driveline parameters.
        let omega = v * p.gear_ratio * p.final_drive_ratio / p.wheel_radius;
        let cranking = 0.5 * p.engine_inertia * omega * omega;
        let rel = (kinetic_lost - cranking).abs() / cranking;
        assert!(rel <= 1e-9, "v = {v}: relative error {rel}");
    }
    println!("ACCEPTANCE 5 PASS: restart drop conserves energy to 1e-9 at 1000 speeds");
}

/// 8. Branch & bound matches enumeration on random windows; the node cap
/// degrades gracefully.
#[test]
fn acceptance_8_branch_and_bound_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xB8);
    let mut compared = 0;
    for trial in 0..50 {
        let mode = if trial % 2 == 0 {
            PowertrainMode::FuelCutOff
        } else {
            PowertrainMode::EngineStartStop
        };
        let peak: f64 = rng.gen_range(0.5..2.0);
        let profile = synth_hill(200.0, peak.to_radians(), DS);
        let n = profile.len();
        let v0 = rng.gen_range(60.0..85.0);
        let vref = rng.gen_range(55.0..88.0);
        let beta = rng.gen_range(0.1..0.9);
        let s = scenario(mode, profile, v0, Some(vref), CostWeights::new(beta, 0.0));
        let k = rng.gen_range(0..n - 8);
        let hist = [[1, 1, 1, 1], [1, 1, 0, 0], [0, 0, 0, 0], [1, 0, 0, 0]]
            [rng.gen_range(0..4usize)];
        let history = BinaryHistory::new(hist.to_vec()).unwrap();
        let base = MpcConfig {
            horizon_steps: 8,
            d_min: 4,
            weights: s.weights,
            max_iterations: 1_000_000,
            solver_kind: SolverKind::Enumerate,
        };
        let capped = MpcConfig {
            solver_kind: SolverKind::BranchAndBound,
            max_iterations: 200,
            ..base
        };
        let unbounded = MpcConfig {
            solver_kind: SolverKind::BranchAndBound,
            ..base
        };
        let enumerated = mimpc_step(&s, k, s.v0, &history, &base, None);
        let bnb = mimpc_step(&s, k, s.v0, &history, &unbounded, None);
        match (enumerated, bnb) {
            (Ok(a), Ok(b)) => {
                assert!(
                    (a.objective - b.objective).abs() <= 1e-9 * (1.0 + a.objective.abs()),
                    "trial {trial}: enumeration {} vs b&b {}",
                    a.objective,
                    b.objective
                );
                assert_eq!(b.status, SolveStatus::Optimal);
                // Capped solve: never better than the optimum, and any
                // degradation must be flagged as a fallback.
                let c = mimpc_step(&s, k, s.v0, &history, &capped, None).unwrap();
                assert!(c.objective >= a.objective - 1e-9 * (1.0 + a.objective.abs()));
                if c.objective > a.objective + 1e-9 * (1.0 + a.objective.abs()) {
                    assert_eq!(c.status, SolveStatus::IterationLimitFallback);
                }
                compared += 1;
            }
            (Err(_), Err(_)) => {}
            (a, b) => panic!(
                "trial {trial}: feasibility mismatch (enumeration {:?}, b&b {:?})",
                a.is_ok(),
                b.is_ok()
            ),
        }
    }
    assert!(compared >= 40, "only {compared} feasible windows");
    println!(
        "ACCEPTANCE 8 PASS: b&b == enumeration on {compared} random windows; \
         node cap degrades safely"
    );
}

// ---------------------------------------------------------------------
// Closed-loop comparison fixture shared by criteria 3, 4, 6, and 7: a
// 2 km rolling-grade scenario with a reference dip whose ramp back up is
// mildly traction-limited, so grade/reference preview genuinely pays off.
// All runs are deterministic; the fixture is built once.

const DP_BETA: f64 = 0.35;
const MPC_BETA: f64 = 0.25;

fn comparison_scenario() -> ScenarioSpec {
    let n = 400;
    let amp = 1.0f64.to_radians();
    let grades: Vec<f64> = (0..n)
        .map(|k| amp * (2.0 * std::f64::consts::PI * (k as f64) * DS / 1000.0).sin())
        .collect();
    let profile = SlopeProfile::new(DS, grades).unwrap();
    // 75 km/h cruise with a dip to 70: coast-friendly ramp down on the
    // downhill, ramp back up across the flat-to-uphill transition.
    let mut speeds = vec![75.0 * KMH_TO_MPS; n];
    for k in 120..210 {
        let kmh = match k {
            120..=139 => 75.0 - 0.25 * (k - 119) as f64,
            140..=189 => 70.0,
            _ => (70.0 + 0.25 * (k - 189) as f64).min(75.0),
        };
        speeds[k] = kmh * KMH_TO_MPS;
    }
    ScenarioSpec {
        vehicle: VehicleParams::default(),
        options: ModelOptions::default(),
        reference: Some(ReferenceTrace::new(DS, speeds).unwrap()),
        profile,
        v0: 75.0 * KMH_TO_MPS,
        mode: PowertrainMode::FuelCutOff,
        weights: CostWeights::new(MPC_BETA, 0.0),
        limits: OperatingLimits::default(),
    }
}

struct LoopSuite {
    reference: ReferenceTrace,
    dp: ecocoast_core::DpSolution,
    /// Receding-horizon runs keyed by horizon length.
    mimpc: Vec<(usize, TrajectoryLog, Vec<SolveResult>)>,
    pi_log: TrajectoryLog,
    perturbed_reference: ReferenceTrace,
    mimpc_perturbed: (TrajectoryLog, Vec<SolveResult>),
    heuristic_perturbed: (TrajectoryLog, Vec<SolveResult>),
}

fn mean_solve_time(results: &[SolveResult]) -> f64 {
    results.iter().map(|r| r.solve_time).sum::<f64>() / results.len() as f64
}

fn loop_suite() -> &'static LoopSuite {
    static SUITE: std::sync::OnceLock<LoopSuite> = std::sync::OnceLock::new();
    SUITE.get_or_init(|| {
        let scenario = comparison_scenario();
        let reference = scenario.reference.clone().unwrap();

        let mut dp_scenario = scenario.clone();
        dp_scenario.weights = CostWeights::new(DP_BETA, 0.0);
        let grid = DpGrid::with_resolution(&scenario.limits, 641, 49, 11);
        let dp = dp_tracking_solve(&dp_scenario, &grid, &DpOptions::default()).unwrap();

        let config = |nh: usize| MpcConfig {
            horizon_steps: nh,
            weights: CostWeights::new(MPC_BETA, 0.0),
            ..MpcConfig::default()
        };
        let mimpc = [10usize, 15, 20]
            .iter()
            .map(|&nh| {
                let (log, results) = mimpc_run(&scenario, &config(nh)).unwrap();
                (nh, log, results)
            })
            .collect();

        let pi_log = pi_run(&scenario, &PiConfig::for_mode(scenario.mode)).unwrap();

        // Windowed reference perturbation the offline binaries know
        // nothing about.
        let mut perturbed = scenario.clone();
        {
            let r = perturbed.reference.as_mut().unwrap();
            for k in 300..340 {
                r.speeds[k] = 72.0 * KMH_TO_MPS;
            }
        }
        let perturbed_reference = perturbed.reference.clone().unwrap();
        let mimpc_perturbed = mimpc_run(&perturbed, &config(20)).unwrap();
        let heuristic_perturbed =
            heuristic_mpc_run(&perturbed, &dp.trajectory.signals(), &config(20)).unwrap();

        LoopSuite {
            reference,
            dp,
            mimpc,
            pi_log,
            perturbed_reference,
            mimpc_perturbed,
            heuristic_perturbed,
        }
    })
}

/// 3. Closed-loop MPC fuel sits between the offline optimum and the PI
/// baseline at matched tracking quality.
#[test]
fn acceptance_3_mpc_between_dp_and_pi() {
    let start = std::time::Instant::now();
    let s = loop_suite();
    let (_, log20, _) = s.mimpc.iter().find(|(nh, ..)| *nh == 20).unwrap();

    let dp_fuel = s.dp.fuel_g;
    let mpc_fuel = log20.total_fuel_g();
    let pi_fuel = s.pi_log.total_fuel_g();
    let dp_rmse = s.dp.trajectory.tracking_rmse(&s.reference);
    let mpc_rmse = log20.tracking_rmse(&s.reference);

    assert!(
        dp_fuel <= mpc_fuel && mpc_fuel <= pi_fuel,
        "fuel sandwich violated: dp {dp_fuel:.4} / mpc {mpc_fuel:.4} / pi {pi_fuel:.4}"
    );
    assert!(
        mpc_fuel <= 1.05 * dp_fuel,
        "mpc fuel {mpc_fuel:.4} more than 5% above dp {dp_fuel:.4}"
    );
    let ratio = mpc_rmse / dp_rmse;
    assert!(
        (0.9..=1.1).contains(&ratio),
        "tracking rmse not matched: dp {dp_rmse:.5}, mpc {mpc_rmse:.5}"
    );
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 900.0, "ran {elapsed:.0} s (budget 900 s)");
    println!(
        "ACCEPTANCE 3 PASS: fuel dp {dp_fuel:.2} <= mpc {mpc_fuel:.2} <= pi {pi_fuel:.2} g \
         at rmse ratio {ratio:.3}, {elapsed:.0} s"
    );
}

/// 4. The minimum-off rule holds across receding-horizon seams on every
/// closed-loop MPC log in the suite.
#[test]
fn acceptance_4_min_off_feasibility() {
    let s = loop_suite();
    let d_min = MpcConfig::default().d_min;
    let history = BinaryHistory::all_on(d_min);
    let mut checked = 0;
    let mut logs: Vec<(String, &TrajectoryLog)> = s
        .mimpc
        .iter()
        .map(|(nh, log, _)| (format!("horizon {nh}"), log))
        .collect();
    logs.push(("perturbed".to_string(), &s.mimpc_perturbed.0));
    for (label, log) in logs {
        let signals = log.signals();
        assert!(
            satisfies_min_off(&history, &signals, d_min),
            "min-off violation in the {label} run"
        );
        checked += 1;
    }
    println!(
        "ACCEPTANCE 4 PASS: no d_min={d_min} violations across {checked} closed-loop logs"
    );
}

/// 6. Longer horizons track no worse and cost strictly more solve time.
#[test]
fn acceptance_6_horizon_monotonicity() {
    let s = loop_suite();
    let stats: Vec<(usize, f64, f64)> = s
        .mimpc
        .iter()
        .map(|(nh, log, results)| (*nh, log.tracking_rmse(&s.reference), mean_solve_time(results)))
        .collect();
    let rmse = |nh: usize| stats.iter().find(|t| t.0 == nh).unwrap().1;
    assert!(
        rmse(20) <= rmse(10),
        "rmse(20) = {:.5} > rmse(10) = {:.5}",
        rmse(20),
        rmse(10)
    );
    for w in stats.windows(2) {
        assert!(
            w[1].2 > w[0].2,
            "solve time not increasing: {:?} -> {:?}",
            w[0],
            w[1]
        );
    }
    println!(
        "ACCEPTANCE 6 PASS: rmse {:.5} (nh=10) >= {:.5} (nh=20); solve times {:.4}/{:.4}/{:.4} s",
        rmse(10),
        rmse(20),
        stats[0].2,
        stats[1].2,
        stats[2].2
    );
}

/// 7. Fixing the binaries offline buys a large per-step speedup but loses
/// tracking quality once the reference deviates from what the offline
/// plan assumed.
#[test]
fn acceptance_7_heuristic_speed_and_degradation() {
    let s = loop_suite();
    let (mlog, mres) = &s.mimpc_perturbed;
    let (hlog, hres) = &s.heuristic_perturbed;

    let m_solve = mean_solve_time(mres);
    let h_solve = mean_solve_time(hres);
    assert!(
        h_solve * 5.0 <= m_solve,
        "heuristic {h_solve:.5} s/step not 5x faster than mimpc {m_solve:.5} s/step"
    );

    let m_rmse = mlog.tracking_rmse(&s.perturbed_reference);
    let h_rmse = hlog.tracking_rmse(&s.perturbed_reference);
    assert!(
        h_rmse > m_rmse,
        "heuristic rmse {h_rmse:.5} not above mimpc {m_rmse:.5}"
    );

    let m_fuel = mlog.total_fuel_g();
    let h_fuel = hlog.total_fuel_g();
    let fuel_gap = (h_fuel - m_fuel).abs() / m_fuel;
    assert!(fuel_gap < 0.05, "fuel gap {fuel_gap:.4} >= 5%");
    println!(
        "ACCEPTANCE 7 PASS: heuristic {:.0}x faster; rmse {h_rmse:.4} > {m_rmse:.4}; \
         fuel gap {:.2}%",
        m_solve / h_solve,
        100.0 * fuel_gap
    );
}

/// 9. The fuel cut-off switching penalty monotonically suppresses
/// switching.
#[test]
fn acceptance_9_switch_penalty_monotonicity() {
    let limits = OperatingLimits::default();
    let grid = DpGrid::default_for(&limits);
    let options = DpOptions::default();
    let mut counts = Vec::new();
    for &alpha in &[0.0, 0.001, 0.004, 0.01] {
        let s = scenario(
            PowertrainMode::FuelCutOff,
            synth_hill(1000.0, 2.0f64.to_radians(), DS),
            75.0,
            None,
            CostWeights::new(0.5, alpha),
        );
        let sol = dp_solve(&s, &grid, &options).unwrap();
        counts.push((alpha, sol.switch_count));
    }
    for w in counts.windows(2) {
        assert!(
            w[1].1 <= w[0].1,
            "switch count increased: {:?} -> {:?}",
            w[0],
            w[1]
        );
    }
    assert!(counts[0].1 > 0, "no switching at alpha = 0");
    println!(
        "ACCEPTANCE 9 PASS: switch counts non-increasing in alpha: {:?}",
        counts
    );
}
