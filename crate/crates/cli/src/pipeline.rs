use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::io::Write;
use std::ops::Range;

use anyhow::Context;
use quatfreq_core::models::{
    observation_noise, total_power, EstimatorKind, FrequencyEstimator, LssEstimator, QssEstimator,
    Tuning, WlssEstimator,
};
use quatfreq_core::phasor::{LowPassFilter, PhasorTracker};
use quatfreq_core::signal::{ground_truth, ingest_csv, simulate, ThreePhaseFrame, TruthSample};

use crate::config::{RunConfig, Source};

/// SNR assumed for the observation noise when the record carries none.
pub const FALLBACK_SNR_DB: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorRow {
    pub amplitude: [f64; 3],
    pub angle_deg: [f64; 3],
    pub reconstruction: [f64; 3],
}

impl PhasorRow {
    const MISSING: PhasorRow = PhasorRow {
        amplitude: [f64::NAN; 3],
        angle_deg: [f64::NAN; 3],
        reconstruction: [f64::NAN; 3],
    };
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    pub t: f64,
    pub f_true: f64,
    /// Indexed like [`EstimatorKind::ALL`]; NaN for unselected estimators.
    pub f: [f64; 3],
    pub phasor: Option<PhasorRow>,
}

/// Output of one run over one stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub fs: Option<f64>,
    pub estimators: Vec<EstimatorKind>,
    pub phasors: bool,
    pub rows: Vec<TraceRow>,
    /// Sample index at which an estimator failed.
    pub diverged: BTreeMap<EstimatorKind, u64>,
    /// Generator ground truth, when the stream was simulated.
    pub truth: Option<Vec<TruthSample>>,
    pub segments: Vec<Range<usize>>,
}

impl Trace {
    pub fn estimates(&self, kind: EstimatorKind) -> Vec<f64> {
        let k = index(kind);
        self.rows.iter().map(|r| r.f[k]).collect()
    }

    pub fn errors(&self, kind: EstimatorKind) -> Vec<f64> {
        let k = index(kind);
        self.rows.iter().map(|r| r.f[k] - r.f_true).collect()
    }
}

pub fn index(kind: EstimatorKind) -> usize {
    kind as usize
}

/// Tuning with the observation noise derived from the first nominal cycle.
pub fn tuning_for(frames: &[ThreePhaseFrame], fs: f64, snr_db: Option<f64>, config: &RunConfig) -> Tuning {
    let base = Tuning::default();
    let cycle = ((fs / base.nominal_hz).round() as usize).clamp(1, frames.len().max(1));
    let snr = snr_db.filter(|s| s.is_finite()).unwrap_or(FALLBACK_SNR_DB);
    let power = total_power(&frames[..cycle.min(frames.len())]);
    config.tuning.apply(Tuning {
        cs: observation_noise(power, snr),
        ..base
    })
}

struct Bank {
    lss: Option<LssEstimator>,
    wlss: Option<WlssEstimator>,
    qss: Option<QssEstimator>,
    report_qss: bool,
    tracker: Option<PhasorTracker>,
}

impl Bank {
    fn estimator(&mut self, kind: EstimatorKind) -> Option<&mut dyn FrequencyEstimator> {
        match kind {
            EstimatorKind::Lss => self.lss.as_mut().map(|e| e as &mut dyn FrequencyEstimator),
            EstimatorKind::Wlss => self.wlss.as_mut().map(|e| e as &mut dyn FrequencyEstimator),
            EstimatorKind::Qss => self.qss.as_mut().map(|e| e as &mut dyn FrequencyEstimator),
        }
    }
}

/// Runs trial `trial` (noise seed `config.seed + trial`).
pub fn run_trial(config: &RunConfig, trial: usize) -> anyhow::Result<Trace> {
    let seed = config.seed.wrapping_add(trial as u64);
    let (frames, truth, fs, snr, segments) = match &config.source {
        Source::Scenario(spec) => {
            let mut spec = spec.clone();
            spec.seed = seed;
            let frames = simulate(&spec)?;
            let truth = ground_truth(&spec)?;
            (frames, Some(truth), Some(spec.fs), spec.snr_db, spec.segment_ranges())
        }
        Source::Recording(path) => {
            let rec = ingest_csv(path).with_context(|| format!("ingesting {}", path.display()))?;
            let n = rec.frames.len();
            (rec.frames, None, rec.fs, None, std::iter::once(0..n).collect())
        }
    };
    let mut trace = Trace {
        fs,
        estimators: config.estimators.clone(),
        phasors: config.phasors,
        rows: Vec::with_capacity(frames.len()),
        diverged: BTreeMap::new(),
        truth,
        segments,
    };
    let Some(fs) = fs else {
        return Ok(trace);
    };
    let dt = 1.0 / fs;
    let tuning = tuning_for(&frames, fs, snr, config);
    let selected = |k| config.estimators.contains(&k);
    let mut bank = Bank {
        lss: selected(EstimatorKind::Lss).then(|| LssEstimator::new(tuning, dt)),
        wlss: selected(EstimatorKind::Wlss).then(|| WlssEstimator::new(tuning, dt)),
        qss: (selected(EstimatorKind::Qss) || config.phasors).then(|| QssEstimator::new(tuning, dt)),
        report_qss: selected(EstimatorKind::Qss),
        tracker: if config.phasors {
            Some(PhasorTracker::new(LowPassFilter::from_cutoff(
                config.lpf_hz,
                fs,
                config.lpf_stages,
            )?))
        } else {
            None
        },
    };

    for (i, frame) in frames.iter().enumerate() {
        let mut row = TraceRow {
            n: frame.n,
            t: frame.t,
            f_true: trace.truth.as_ref().map_or(f64::NAN, |t| t[i].freq),
            f: [f64::NAN; 3],
            phasor: None,
        };
        for kind in EstimatorKind::ALL {
            let Some(est) = bank.estimator(kind) else { continue };
            let value = match trace.diverged.entry(kind) {
                Entry::Occupied(_) => 0.0,
                Entry::Vacant(slot) => match est.step(frame) {
                    Ok(f) => f,
                    Err(e) => {
                        eprintln!("warning: {kind} failed at sample {}: {e}; remaining estimates zeroed", frame.n);
                        slot.insert(frame.n);
                        0.0
                    }
                },
            };
            if kind != EstimatorKind::Qss || bank.report_qss {
                row.f[index(kind)] = value;
            }
        }
        if let Some(tracker) = bank.tracker.as_mut() {
            let state = bank.qss.as_ref().and_then(|q| q.state());
            let est = match state {
                Some(s) if !trace.diverged.contains_key(&EstimatorKind::Qss) => tracker.step(frame, &s).ok(),
                _ => None,
            };
            row.phasor = Some(est.map_or(PhasorRow::MISSING, |e| PhasorRow {
                amplitude: e.phasors.amplitude,
                angle_deg: e.phasors.angle.map(f64::to_degrees),
                reconstruction: e.reconstruction,
            }));
        }
        trace.rows.push(row);
    }
    Ok(trace)
}

const PHASOR_COLUMNS: [&str; 9] = [
    "amp_a", "amp_b", "amp_c", "angle_a_deg", "angle_b_deg", "angle_c_deg", "rec_a", "rec_b", "rec_c",
];

/// `n,t,f_true,f_lss,f_wlss,f_qss`, followed by phasor columns when enabled.
pub fn write_trace<W: Write>(out: W, trace: &Trace) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["n", "t", "f_true", "f_lss", "f_wlss", "f_qss"];
    if trace.phasors {
        header.extend(PHASOR_COLUMNS);
    }
    w.write_record(&header)?;
    for r in &trace.rows {
        let mut record = vec![r.n.to_string(), r.t.to_string(), r.f_true.to_string()];
        record.extend(r.f.iter().map(f64::to_string));
        if trace.phasors {
            let p = r.phasor.unwrap_or(PhasorRow::MISSING);
            record.extend(
                p.amplitude
                    .iter()
                    .chain(&p.angle_deg)
                    .chain(&p.reconstruction)
                    .map(f64::to_string),
            );
        }
        w.write_record(&record)?;
    }
    w.flush()
}
