//! Three-phase waveform synthesis, noise injection and recorded-data I/O.

mod csv_io;
mod noise;
mod scenario;

pub use csv_io::{ingest_csv, read_frames, write_frames, Ingested};
pub use noise::{add_noise, empirical_snr_db};
pub use scenario::{
    PHASE_OFFSETS,
    generate, ground_truth, preset, simulate, FrequencyProfile, ScenarioSpec, Segment,
    TruthSample, PRESETS,
};

use serde::{Deserialize, Serialize};

use crate::quaternion::Quaternion;

/// One sample of the three instantaneous phase voltages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreePhaseFrame {
    pub n: u64,
    /// Seconds, `n·ΔT` for generated data.
    pub t: f64,
    pub va: f64,
    pub vb: f64,
    pub vc: f64,
}

impl ThreePhaseFrame {
    pub fn voltages(&self) -> [f64; 3] {
        [self.va, self.vb, self.vc]
    }

    /// Pure quaternion `i·v_a + j·v_b + k·v_c`.
    pub fn to_quaternion(&self) -> Quaternion {
        to_quaternion(self)
    }
}

/// Pure quaternion `i·v_a + j·v_b + k·v_c`.
pub fn to_quaternion(frame: &ThreePhaseFrame) -> Quaternion {
    Quaternion::pure(frame.va, frame.vb, frame.vc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_embedding_is_pure() {
        let f = ThreePhaseFrame { n: 0, t: 0.0, va: 1.0, vb: 2.0, vc: 3.0 };
        assert_eq!(f.to_quaternion(), Quaternion::pure(1.0, 2.0, 3.0));
        assert_eq!(f.to_quaternion().r, 0.0);
    }
}
