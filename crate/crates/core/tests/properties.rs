//! Randomized invariant checks for the plant model, the minimum-off rule,
//! and the file round trips.

use proptest::prelude::*;
use tempfile::tempdir;

use ecocoast_core::*;

fn params() -> (VehicleParams, ModelOptions) {
    (VehicleParams::default(), ModelOptions::default())
}

fn modes() -> impl Strategy<Value = PowertrainMode> {
    prop_oneof![
        Just(PowertrainMode::Baseline),
        Just(PowertrainMode::FuelCutOff),
        Just(PowertrainMode::EngineStartStop),
    ]
}

proptest! {
    /// Fuel flows only while the signal is on: an off-step burns exactly
    /// zero, an on-step strictly more (idle term of the polynomial).
    #[test]
    fn fuel_gated_by_signal(
        v in 14.0..25.0f64,
        grade in -0.05..0.05f64,
        te in 0.0..120.0f64,
        tb in 0.0..400.0f64,
        mode in modes(),
    ) {
        let (p, o) = params();
        if mode.is_binary() {
            let out = advance(&p, &o, mode, &ControlStep::coast(tb), 0, v, grade, 5.0);
            if let Ok(out) = out {
                prop_assert_eq!(out.fuel_used, 0.0);
            }
        }
        let out = advance(&p, &o, mode, &ControlStep::drive(te), 1, v, grade, 5.0);
        if let Ok(out) = out {
            prop_assert!(out.fuel_used > 0.0);
            prop_assert!((out.time_elapsed - 5.0 / v).abs() < 1e-12);
        }
    }

    /// With the engine drag torque zeroed and the signal held on, all
    /// three drivetrain variants reduce to the same dynamics.
    #[test]
    fn modes_coincide_without_drag_or_restarts(
        v in 14.0..25.0f64,
        grade in -0.05..0.05f64,
        te in 0.0..120.0f64,
    ) {
        let (mut p, o) = params();
        p.engine_drag_torque = 0.0;
        let step = ControlStep::drive(te);
        let base = advance(&p, &o, PowertrainMode::Baseline, &step, 1, v, grade, 5.0).unwrap();
        let fco = advance(&p, &o, PowertrainMode::FuelCutOff, &step, 1, v, grade, 5.0).unwrap();
        let ess = advance(&p, &o, PowertrainMode::EngineStartStop, &step, 1, v, grade, 5.0).unwrap();
        prop_assert!((base.next_speed - fco.next_speed).abs() < 1e-15);
        prop_assert!((base.next_speed - ess.next_speed).abs() < 1e-15);
        prop_assert!((base.fuel_used - fco.fuel_used).abs() < 1e-15);
        prop_assert!((base.fuel_used - ess.fuel_used).abs() < 1e-15);
    }

    /// Coasting with fuel cut-off drags the driveline; start/stop
    /// decouples it, so the start/stop vehicle always rolls out faster.
    #[test]
    fn cut_off_coast_decelerates_harder_than_start_stop(
        v in 14.0..25.0f64,
        grade in -0.05..0.05f64,
        tb in 0.0..200.0f64,
    ) {
        let (p, o) = params();
        let step = ControlStep::coast(tb);
        let fco = advance(&p, &o, PowertrainMode::FuelCutOff, &step, 0, v, grade, 5.0);
        let ess = advance(&p, &o, PowertrainMode::EngineStartStop, &step, 0, v, grade, 5.0);
        if let (Ok(fco), Ok(ess)) = (fco, ess) {
            prop_assert!(fco.next_speed < ess.next_speed);
        }
    }

    /// The restart speed drop conserves energy: the kinetic energy lost
    /// equals the cranking energy at that speed.
    #[test]
    fn restart_drop_conserves_energy(v in 5.0..30.0f64) {
        let (p, o) = params();
        let drop = model::restart_speed_drop(&p, &o, v).unwrap();
        let v_after = v - drop;
        let kinetic_lost = 0.5 * p.effective_mass * (v * v - v_after * v_after);
        let cranking = model::restart_energy(&p, &o, v);
        prop_assert!((kinetic_lost - cranking).abs() <= 1e-9 * cranking.max(1.0));
    }

    /// The restart drop is charged exactly on off->on transitions of the
    /// start/stop drivetrain and never otherwise.
    #[test]
    fn restart_charged_on_rising_edge_only(
        v in 10.0..25.0f64,
        prev in 0u8..2,
        sig in 0u8..2,
        mode in modes(),
    ) {
        let (p, o) = params();
        let step = if sig == 1 { ControlStep::drive(30.0) } else { ControlStep::coast(0.0) };
        if mode == PowertrainMode::Baseline && sig == 0 { return Ok(()); }
        let out = advance(&p, &o, mode, &step, prev, v, 0.0, 5.0).unwrap();
        let expect_restart = mode == PowertrainMode::EngineStartStop && prev == 0 && sig == 1;
        prop_assert_eq!(out.restart_speed_drop > 0.0, expect_restart);
    }

    /// The minimum-off inequality set agrees with the verbal rule (every
    /// 1->0 transition starts an off-run of at least d_min, truncation at
    /// the end allowed) for arbitrary histories and plans.
    #[test]
    fn min_off_matches_verbal_rule(
        hist_bits in proptest::collection::vec(0u8..2, 1..6),
        plan in proptest::collection::vec(0u8..2, 0..10),
        d_min in 1usize..6,
    ) {
        let history = BinaryHistory::new(hist_bits.clone()).unwrap();
        let ext: Vec<u8> = hist_bits.iter().chain(&plan).copied().collect();
        let mut ok = true;
        for j in 1..ext.len() {
            if ext[j - 1] == 1 && ext[j] == 0 {
                for tau in (j + 1)..=(j + d_min - 1).min(ext.len() - 1) {
                    if ext[tau] == 1 {
                        ok = false;
                    }
                }
            }
        }
        prop_assert_eq!(satisfies_min_off(&history, &plan, d_min), ok);
    }

    /// Profile and reference CSV round trips preserve the data.
    #[test]
    fn profile_reference_round_trip(
        grades_deg in proptest::collection::vec(-10.0..10.0f64, 2..40),
        speeds_kmh in proptest::collection::vec(30.0..110.0f64, 2..40),
        ds in 1.0..25.0f64,
    ) {
        let dir = tempdir().unwrap();
        let p = SlopeProfile::new(ds, grades_deg.iter().map(|d| d.to_radians()).collect()).unwrap();
        let path = dir.path().join("p.csv");
        io::write_profile(&p, &path).unwrap();
        let q = io::load_profile(&path).unwrap();
        prop_assert!((p.step_length - q.step_length).abs() < 1e-9);
        for (a, b) in p.grades.iter().zip(&q.grades) {
            prop_assert!((a - b).abs() < 1e-12);
        }

        let t = ReferenceTrace::new(ds, speeds_kmh.iter().map(|v| v / 3.6).collect()).unwrap();
        let path = dir.path().join("r.csv");
        io::write_reference(&t, &path).unwrap();
        let u = io::load_reference(&path).unwrap();
        for (a, b) in t.speeds.iter().zip(&u.speeds) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    /// Trajectory-log CSV round trips are bit-exact.
    #[test]
    fn log_round_trip(
        speeds in proptest::collection::vec(10.0..30.0f64, 1..20),
        final_speed in 10.0..30.0f64,
    ) {
        let dir = tempdir().unwrap();
        let steps: Vec<LogStep> = speeds
            .iter()
            .enumerate()
            .map(|(i, &v)| LogStep {
                step: i,
                distance_m: i as f64 * 5.0,
                speed_mps: v,
                engine_torque_nm: (i as f64 * 7.3) % 120.0,
                brake_torque_nm: 0.0,
                coast_signal: (i % 2) as u8,
                fuel_g: v * 0.001,
                time_s: 5.0 / v,
            })
            .collect();
        let log = TrajectoryLog { steps, final_speed };
        let path = dir.path().join("log.csv");
        io::write_log(&log, &path).unwrap();
        prop_assert_eq!(io::read_log(&path).unwrap(), log);
    }

    /// A simulation is the fold of single steps: same speeds, same fuel.
    #[test]
    fn simulate_is_advance_fold(
        torques in proptest::collection::vec(0.0..100.0f64, 1..20),
        grade in -0.03..0.03f64,
        mode in modes(),
    ) {
        let (p, o) = params();
        let n = torques.len();
        let profile = SlopeProfile::new(5.0, vec![grade; n]).unwrap();
        let controls: Vec<ControlStep> =
            torques.iter().map(|&t| ControlStep::drive(t)).collect();
        let v0 = 20.0;
        let log = simulate(&p, &o, mode, &profile, &controls, v0, 1).unwrap();
        let mut v = v0;
        let mut fuel = 0.0;
        for (i, c) in controls.iter().enumerate() {
            let out = advance(&p, &o, mode, c, 1, v, grade, 5.0).unwrap();
            prop_assert_eq!(log.steps[i].speed_mps, v);
            v = out.next_speed;
            fuel += out.fuel_used;
        }
        prop_assert_eq!(log.final_speed, v);
        let logged: f64 = log.steps.iter().map(|s| s.fuel_g).sum();
        prop_assert!((logged - fuel).abs() < 1e-12);
    }

    /// Control-step invariants: torque complementarity and non-negativity
    /// are rejected at construction.
    #[test]
    fn control_validation(te in -10.0..130.0f64, tb in -10.0..510.0f64, sig in 0u8..2) {
        let c = ControlStep { engine_torque: te, brake_torque: tb, coast_signal: sig };
        let valid = te >= 0.0 && tb >= 0.0 && (te == 0.0 || tb == 0.0) && !(sig == 0 && te > 0.0);
        prop_assert_eq!(c.validate().is_ok(), valid);
    }
}
