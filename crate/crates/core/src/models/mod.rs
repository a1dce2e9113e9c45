//! State-space models for grid frequency and the streaming estimators built
//! on them.

mod lss;
mod qss;
pub mod sequences;
mod wlss;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use lss::{lss_frequency, LssEstimator, LssModel, LssState};
pub use qss::{qss_frequency, QssEstimator, QssModel, QssState};
pub use sequences::{decompose_sequences, envelopes, sequence_axis, SequenceCoefficients};
pub use wlss::{wlss_frequency, WlssEstimator, WlssModel, WlssState};

use crate::error::{Error, Result};
use crate::signal::ThreePhaseFrame;

/// Filter initialisation and noise settings shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tuning {
    /// Frequency the phase-increment state starts from, Hz.
    pub nominal_hz: f64,
    /// Initial covariance `M₀ = m0·I`.
    pub m0: f64,
    /// State noise on the phase increment (L-SS, Q-SS).
    pub cr_increment: f64,
    /// State noise on the widely linear weights `h`, `g` (WL-SS).
    pub cr_weight: f64,
    /// State noise on the signal states.
    pub cr_signal: f64,
    /// Observation noise variance.
    pub cs: f64,
    /// Share of the first Q-SS observation assigned to `q⁺`; the rest
    /// seeds `q⁻`.
    pub positive_share: f64,
}

impl Default for Tuning {
    fn default() -> Self {
        Self {
            nominal_hz: 50.0,
            m0: 1.0,
            cr_increment: 1e-8,
            cr_weight: 1e-7,
            cr_signal: 1e-4,
            cs: observation_noise(1.5, 40.0),
            positive_share: 1.0,
        }
    }
}

/// `10^(−snr/10)` times the summed three-phase power `mean(va² + vb² + vc²)`.
pub fn observation_noise(total_power: f64, snr_db: f64) -> f64 {
    total_power * 10f64.powf(-snr_db / 10.0)
}

/// Summed three-phase power of a block of frames.
pub fn total_power(frames: &[ThreePhaseFrame]) -> f64 {
    if frames.is_empty() {
        return 0.0;
    }
    frames
        .iter()
        .map(|f| f.va * f.va + f.vb * f.vb + f.vc * f.vc)
        .sum::<f64>()
        / frames.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorKind {
    Lss,
    Wlss,
    Qss,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 3] = [EstimatorKind::Lss, EstimatorKind::Wlss, EstimatorKind::Qss];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Lss => "lss",
            EstimatorKind::Wlss => "wlss",
            EstimatorKind::Qss => "qss",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lss" => Ok(EstimatorKind::Lss),
            "wlss" => Ok(EstimatorKind::Wlss),
            "qss" => Ok(EstimatorKind::Qss),
            other => Err(Error::InvalidSpec(format!("unknown estimator {other:?}"))),
        }
    }
}

/// Counters for read-out edge cases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// WL-SS samples whose discriminant was clamped at zero.
    pub clamped: u64,
    /// Q-SS samples whose phase increment had no imaginary part.
    pub degenerate: u64,
}

/// Sample-by-sample frequency tracker.
pub trait FrequencyEstimator {
    fn kind(&self) -> EstimatorKind;

    /// Consumes one frame and returns the frequency estimate in Hz. The
    /// first frame initialises the filter and yields the nominal frequency.
    fn step(&mut self, frame: &ThreePhaseFrame) -> Result<f64>;

    /// Smallest eigenvalue of the real embedding of the state covariance.
    fn covariance_floor(&self) -> Option<f64>;

    /// Largest entry of `M − Mᴴ`.
    fn covariance_defect(&self) -> Option<f64>;

    fn diagnostics(&self) -> Diagnostics {
        Diagnostics::default()
    }
}

/// Estimator of the given kind for sampling interval `dt`.
pub fn build_estimator(kind: EstimatorKind, tuning: Tuning, dt: f64) -> Box<dyn FrequencyEstimator + Send> {
    match kind {
        EstimatorKind::Lss => Box::new(LssEstimator::new(tuning, dt)),
        EstimatorKind::Wlss => Box::new(WlssEstimator::new(tuning, dt)),
        EstimatorKind::Qss => Box::new(QssEstimator::new(tuning, dt)),
    }
}

/// Rejects non-finite states and phase increments outside `(0, 2)` in modulus.
fn divergence_guard(increment_norm: f64, finite: bool) -> Result<()> {
    if !finite {
        return Err(Error::Divergence("non-finite filter state".into()));
    }
    if !(increment_norm > 0.0 && increment_norm < 2.0) {
        return Err(Error::Divergence(format!(
            "phase increment modulus {increment_norm} left (0, 2)"
        )));
    }
    Ok(())
}
