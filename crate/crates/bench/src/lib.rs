//! Shared fixtures for the benchmarks.

use ecocoast_core::{
    synth_hill, CostWeights, ModelOptions, OperatingLimits, PowertrainMode, ReferenceTrace,
    ScenarioSpec, VehicleParams, KMH_TO_MPS,
};

/// 1 km synthetic hill in fuel cut-off mode with a constant 75 km/h
/// reference, usable by every solver.
pub fn hill_scenario() -> ScenarioSpec {
    let profile = synth_hill(1000.0, 2.0_f64.to_radians(), 5.0);
    let n = profile.len();
    ScenarioSpec {
        vehicle: VehicleParams::default(),
        options: ModelOptions::default(),
        reference: Some(ReferenceTrace::new(5.0, vec![75.0 * KMH_TO_MPS; n]).unwrap()),
        profile,
        v0: 75.0 * KMH_TO_MPS,
        mode: PowertrainMode::FuelCutOff,
        weights: CostWeights::new(0.5, 0.0),
        limits: OperatingLimits::default(),
    }
}
