use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::noise::add_noise;
use super::ThreePhaseFrame;
use crate::error::{Error, Result};

/// Phase offsets of phases a, b, c.
pub const PHASE_OFFSETS: [f64; 3] = [0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0];

/// Frequency inside a segment: a constant, or a linear ramp starting at the
/// segment boundary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FrequencyProfile {
    Constant(f64),
    Ramp { f0: f64, slope: f64 },
}

impl FrequencyProfile {
    /// Frequency `elapsed` seconds into the segment.
    pub fn at(&self, elapsed: f64) -> f64 {
        match *self {
            FrequencyProfile::Constant(f) => f,
            FrequencyProfile::Ramp { f0, slope } => f0 + slope * elapsed,
        }
    }
}

/// Piecewise-constant amplitudes and phase shifts (radians) with a
/// frequency profile, valid from `start_t` until the next segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start_t: f64,
    #[serde(rename = "V_a")]
    pub v_a: f64,
    #[serde(rename = "V_b")]
    pub v_b: f64,
    #[serde(rename = "V_c")]
    pub v_c: f64,
    pub phi_a: f64,
    pub phi_b: f64,
    pub phi_c: f64,
    pub freq: FrequencyProfile,
}

impl Segment {
    pub fn balanced(start_t: f64, amplitude: f64, freq: FrequencyProfile) -> Self {
        Self {
            start_t,
            v_a: amplitude,
            v_b: amplitude,
            v_c: amplitude,
            phi_a: 0.0,
            phi_b: 0.0,
            phi_c: 0.0,
            freq,
        }
    }

    /// 80% drop on phase a, 20° shifts on phases b and c.
    pub fn sag(start_t: f64, freq: FrequencyProfile) -> Self {
        let shift = 20f64.to_radians();
        Self {
            start_t,
            v_a: 0.2,
            v_b: 1.0,
            v_c: 1.0,
            phi_a: 0.0,
            phi_b: shift,
            phi_c: shift,
            freq,
        }
    }

    pub fn amplitudes(&self) -> [f64; 3] {
        [self.v_a, self.v_b, self.v_c]
    }

    pub fn phases(&self) -> [f64; 3] {
        [self.phi_a, self.phi_b, self.phi_c]
    }
}

/// Scripted three-phase scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    /// Sampling rate, Hz.
    pub fs: f64,
    /// Seconds.
    pub duration: f64,
    pub segments: Vec<Segment>,
    /// Per-record SNR in dB; absent means noiseless.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

/// Generator ground truth at one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthSample {
    pub n: u64,
    pub t: f64,
    /// Instantaneous frequency between samples `n` and `n + 1`.
    pub freq: f64,
    pub amplitudes: [f64; 3],
    pub phases: [f64; 3],
    /// Accumulated phase `Σ 2π f ΔT`, wrapped to `[0, 2π)`.
    pub theta: f64,
    pub segment: usize,
}

impl TruthSample {
    pub fn voltages(&self) -> [f64; 3] {
        std::array::from_fn(|x| {
            self.amplitudes[x] * (self.theta + self.phases[x] + PHASE_OFFSETS[x]).sin()
        })
    }
}

impl ScenarioSpec {
    pub fn dt(&self) -> f64 {
        1.0 / self.fs
    }

    pub fn sample_count(&self) -> usize {
        (self.duration * self.fs).round() as usize
    }

    /// First sample index of each segment.
    pub fn segment_starts(&self) -> Vec<usize> {
        self.segments
            .iter()
            .map(|s| (s.start_t * self.fs).round() as usize)
            .collect()
    }

    /// Half-open sample ranges of each segment.
    pub fn segment_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let starts = self.segment_starts();
        let n = self.sample_count();
        starts
            .iter()
            .enumerate()
            .map(|(k, &s)| s..starts.get(k + 1).copied().unwrap_or(n))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if !(self.fs.is_finite() && self.fs > 0.0) {
            return bad(format!("fs must be positive, got {}", self.fs));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return bad(format!("duration must be positive, got {}", self.duration));
        }
        if self.segments.is_empty() {
            return bad("at least one segment is required".into());
        }
        if let Some(snr) = self.snr_db {
            if snr.is_nan() || snr == f64::NEG_INFINITY {
                return bad(format!("snr_db must be a number or +inf, got {snr}"));
            }
        }
        let starts = self.segment_starts();
        if starts[0] != 0 {
            return bad(format!("first segment must start at t = 0, got {}", self.segments[0].start_t));
        }
        let n = self.sample_count();
        for (k, w) in starts.windows(2).enumerate() {
            if w[1] <= w[0] {
                return bad(format!("segment {} does not start after segment {}", k + 1, k));
            }
        }
        if *starts.last().unwrap() >= n {
            return bad("last segment starts after the end of the record".into());
        }
        for (k, (seg, range)) in self.segments.iter().zip(self.segment_ranges()).enumerate() {
            let numbers = seg.amplitudes().into_iter().chain(seg.phases()).chain([seg.start_t]);
            if numbers.clone().any(|v| !v.is_finite()) {
                return bad(format!("segment {k} has a non-finite parameter"));
            }
            if seg.amplitudes().iter().any(|&v| v < 0.0) {
                return bad(format!("segment {k} has a negative amplitude"));
            }
            let span = (range.end - range.start) as f64 / self.fs;
            for f in [seg.freq.at(0.0), seg.freq.at(span)] {
                if !f.is_finite() || f < 0.0 {
                    return bad(format!("segment {k} frequency {f} is not a non-negative number"));
                }
                if self.fs <= 2.0 * f {
                    return bad(format!(
                        "segment {k}: fs = {} does not exceed twice the frequency {f}",
                        self.fs
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Per-sample ground truth, phase-continuous across frequency changes.
pub fn ground_truth(spec: &ScenarioSpec) -> Result<Vec<TruthSample>> {
    spec.validate()?;
    let dt = spec.dt();
    let ranges = spec.segment_ranges();
    let mut theta = 0.0f64;
    let mut out = Vec::with_capacity(spec.sample_count());
    for (k, (seg, range)) in spec.segments.iter().zip(ranges).enumerate() {
        for n in range.clone() {
            let t = n as f64 * dt;
            let elapsed = (n - range.start) as f64 * dt;
            let freq = seg.freq.at(elapsed);
            out.push(TruthSample {
                n: n as u64,
                t,
                freq,
                amplitudes: seg.amplitudes(),
                phases: seg.phases(),
                theta,
                segment: k,
            });
            theta = (theta + TAU * freq * dt).rem_euclid(TAU);
        }
    }
    Ok(out)
}

/// Noiseless three-phase voltages of the scenario.
pub fn generate(spec: &ScenarioSpec) -> Result<Vec<ThreePhaseFrame>> {
    Ok(ground_truth(spec)?
        .iter()
        .map(|s| {
            let [va, vb, vc] = s.voltages();
            ThreePhaseFrame { n: s.n, t: s.t, va, vb, vc }
        })
        .collect())
}

/// [`generate`] followed by [`add_noise`] at the scenario's SNR and seed.
pub fn simulate(spec: &ScenarioSpec) -> Result<Vec<ThreePhaseFrame>> {
    let frames = generate(spec)?;
    match spec.snr_db {
        Some(snr) => add_noise(&frames, snr, spec.seed),
        None => Ok(frames),
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: [&str; 4] = ["balanced", "sag", "unbalanced", "ramp"];

/// Built-in scenarios at 1 kHz and 40 dB SNR.
///
/// * `balanced`: 1 s at 50 Hz.
/// * `sag`: balanced 50 Hz, then from 0.667 s to 1.334 s a sag on phase a
///   with 20° shifts on b and c and a 2 Hz step, then balanced 50 Hz to 2 s.
/// * `unbalanced`: 1 s of the sag condition at 50 Hz.
/// * `ramp`: 3 s under the sag condition: 50 Hz, +1 Hz/s from 0.5 s,
///   −1 Hz/s from 1.5 s, 50 Hz from 2.5 s.
pub fn preset(name: &str) -> Option<ScenarioSpec> {
    use FrequencyProfile::*;
    let spec = |duration: f64, segments: Vec<Segment>| ScenarioSpec {
        fs: 1000.0,
        duration,
        segments,
        snr_db: Some(40.0),
        seed: 0,
    };
    Some(match name {
        "balanced" => spec(1.0, vec![Segment::balanced(0.0, 1.0, Constant(50.0))]),
        "sag" => spec(
            2.0,
            vec![
                Segment::balanced(0.0, 1.0, Constant(50.0)),
                Segment::sag(0.667, Constant(52.0)),
                Segment::balanced(1.334, 1.0, Constant(50.0)),
            ],
        ),
        "unbalanced" => spec(1.0, vec![Segment::sag(0.0, Constant(50.0))]),
        "ramp" => spec(
            3.0,
            vec![
                Segment::sag(0.0, Constant(50.0)),
                Segment::sag(0.5, Ramp { f0: 50.0, slope: 1.0 }),
                Segment::sag(1.5, Ramp { f0: 51.0, slope: -1.0 }),
                Segment::sag(2.5, Constant(50.0)),
            ],
        ),
        _ => return None,
    })
}
