//! Fixtures shared by the benchmarks.

use quatfreq_core::models::{observation_noise, total_power, Tuning};
use quatfreq_core::signal::{preset, simulate};
use quatfreq_core::{ScenarioSpec, ThreePhaseFrame};

/// Noisy frames of a built-in scenario.
pub fn frames(name: &str) -> (ScenarioSpec, Vec<ThreePhaseFrame>) {
    let spec = preset(name).unwrap_or_else(|| panic!("unknown preset {name}"));
    let frames = simulate(&spec).expect("preset scenarios are valid");
    (spec, frames)
}

/// Default tuning with the observation noise matched to the scenario.
pub fn tuning(spec: &ScenarioSpec, frames: &[ThreePhaseFrame]) -> Tuning {
    let cycle = (spec.fs / 50.0) as usize;
    Tuning {
        cs: observation_noise(total_power(&frames[..cycle.min(frames.len())]), spec.snr_db.unwrap_or(40.0)),
        ..Tuning::default()
    }
}
