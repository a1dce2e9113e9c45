use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::ops::Range;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::config::MetricSettings;
use crate::pipeline::Trace;

const PHASES: [&str; 3] = ["a", "b", "c"];

/// Flat `key=value` table, sorted by key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MetricsReport(pub BTreeMap<String, f64>);

impl MetricsReport {
    pub fn insert(&mut self, key: impl Into<String>, value: f64) {
        self.0.insert(key.into(), value);
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.0.get(key).copied()
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (k, v) in &self.0 {
            writeln!(out, "{k}={v}")?;
        }
        Ok(())
    }

    /// Mean and sample standard deviation of every key over `reports`,
    /// ignoring non-finite values. Values are summed in sorted order so the
    /// result does not depend on trial order.
    pub fn aggregate(reports: &[MetricsReport]) -> MetricsReport {
        let mut values: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for r in reports {
            for (k, &v) in &r.0 {
                values.entry(k).or_default().push(v);
            }
        }
        let mut out = MetricsReport::default();
        out.insert("trials", reports.len() as f64);
        for (k, mut vs) in values {
            if k.starts_with("window.") {
                out.insert(k, vs[0]);
                continue;
            }
            vs.retain(|v| v.is_finite());
            vs.sort_by(f64::total_cmp);
            let n = vs.len() as f64;
            let mean = vs.iter().sum::<f64>() / n;
            let std = if vs.len() > 1 {
                (vs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            } else {
                0.0
            };
            out.insert(format!("{k}.mean"), if vs.is_empty() { f64::NAN } else { mean });
            out.insert(format!("{k}.std"), if vs.is_empty() { f64::NAN } else { std });
        }
        out
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.0 {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

fn mean_square(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v * v, n + 1));
    sum / n as f64
}

/// Final `fraction` of each segment.
pub fn steady_windows(segments: &[Range<usize>], fraction: f64) -> Vec<Range<usize>> {
    segments
        .iter()
        .map(|r| {
            let len = ((r.end - r.start) as f64 * fraction).round() as usize;
            r.end - len.min(r.end - r.start)..r.end
        })
        .collect()
}

/// First time after which `|error|` stays below `threshold` for `hold`
/// samples.
pub fn convergence_index(errors: &[f64], threshold: f64, hold: usize) -> Option<usize> {
    let mut run = 0;
    for (i, e) in errors.iter().enumerate() {
        if e.abs() < threshold {
            run += 1;
            if run > hold {
                return Some(i - hold);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// Frequency of the largest non-DC peak of the linearly detrended,
/// Hann-windowed signal, zero-padded to at least 8 times its length.
pub fn spectrum_peak(signal: &[f64], fs: f64) -> f64 {
    if signal.len() < 4 {
        return f64::NAN;
    }
    let n = signal.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = signal.iter().sum::<f64>() / n;
    let sxy: f64 = signal.iter().enumerate().map(|(i, y)| (i as f64 - x_mean) * (y - y_mean)).sum();
    let sxx: f64 = (0..signal.len()).map(|i| (i as f64 - x_mean).powi(2)).sum();
    let slope = sxy / sxx;
    let trend = |i: usize| y_mean + slope * (i as f64 - x_mean);
    let len = (8 * signal.len()).next_power_of_two();
    let last = (signal.len() - 1) as f64;
    let mut buf: Vec<Complex<f64>> = signal
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = 0.5 - 0.5 * (std::f64::consts::TAU * i as f64 / last).cos();
            Complex::new((v - trend(i)) * w, 0.0)
        })
        .collect();
    buf.resize(len, Complex::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(len).process(&mut buf);
    let (bin, _) = buf[1..len / 2]
        .iter()
        .enumerate()
        .map(|(i, c)| (i + 1, c.norm_sqr()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
    bin as f64 * fs / len as f64
}

/// Largest magnitude of the error averaged over consecutive blocks.
pub fn max_block_mean(errors: &[f64], block: usize) -> f64 {
    errors
        .chunks(block.max(1))
        .map(|c| (c.iter().sum::<f64>() / c.len() as f64).abs())
        .fold(0.0, f64::max)
}

fn wrap_deg(a: f64) -> f64 {
    (a + 180.0).rem_euclid(360.0) - 180.0
}

/// Metrics of one trial. Without ground truth only divergence is reported.
pub fn trial_metrics(trace: &Trace, settings: &MetricSettings) -> MetricsReport {
    let mut m = MetricsReport::default();
    m.insert("window.convergence_threshold_hz", settings.convergence_threshold);
    m.insert("window.convergence_hold_s", settings.convergence_hold);
    m.insert("window.steady_fraction", settings.steady_fraction);
    m.insert("window.spectrum_skip_s", settings.spectrum_skip);
    m.insert("window.lag_burn_in_s", settings.burn_in);
    m.insert("window.lag_block_s", settings.lag_block);
    for &kind in &trace.estimators {
        let diverged = trace.diverged.get(&kind);
        m.insert(format!("{kind}.diverged"), f64::from(u8::from(diverged.is_some())));
        if let (Some(&n), Some(fs)) = (diverged, trace.fs) {
            m.insert(format!("{kind}.diverged_at_s"), n as f64 / fs);
        }
    }
    let (Some(fs), Some(truth)) = (trace.fs, trace.truth.as_ref()) else {
        return m;
    };
    if trace.rows.is_empty() {
        return m;
    }
    let samples = |s: f64| (s * fs).round() as usize;
    let steady = steady_windows(&trace.segments, settings.steady_fraction);
    for &kind in &trace.estimators {
        let err = trace.errors(kind);
        let mse = mean_square(steady.iter().flat_map(|r| err[r.clone()].iter().copied()));
        m.insert(format!("{kind}.steady_mse_db"), 10.0 * mse.log10());
        m.insert(format!("{kind}.steady_rmse_hz"), mse.sqrt());
        let conv = convergence_index(&err, settings.convergence_threshold, samples(settings.convergence_hold));
        m.insert(format!("{kind}.convergence_time_s"), conv.map_or(f64::NAN, |i| i as f64 / fs));
        let burn = samples(settings.burn_in).min(err.len());
        m.insert(format!("{kind}.max_lag_hz"), max_block_mean(&err[burn..], samples(settings.lag_block)));
        for (s, (seg, win)) in trace.segments.iter().zip(&steady).enumerate() {
            m.insert(format!("{kind}.seg{s}.steady_rmse_hz"), mean_square(err[win.clone()].iter().copied()).sqrt());
            let from = (seg.start + samples(settings.spectrum_skip)).min(seg.end);
            m.insert(format!("{kind}.seg{s}.peak_hz"), spectrum_peak(&err[from..seg.end], fs));
        }
    }
    if trace.phasors {
        let settled: Vec<usize> = trace
            .segments
            .iter()
            .flat_map(|r| (r.start + samples(settings.phasor_settle)).min(r.end)..r.end)
            .collect();
        m.insert("window.phasor_settle_s", settings.phasor_settle);
        for (x, name) in PHASES.iter().enumerate() {
            let rows = || settled.iter().map(|&i| (trace.rows[i].phasor.unwrap(), &truth[i]));
            let rec = mean_square(rows().map(|(p, t)| p.reconstruction[x] - t.voltages()[x]));
            let amp = mean_square(rows().map(|(p, t)| p.amplitude[x] - t.amplitudes[x]));
            let ang = mean_square(rows().map(|(p, t)| {
                wrap_deg(p.angle_deg[x] - (t.phases[x] - t.phases[0]).to_degrees())
            }));
            m.insert(format!("phasor.rec_rmse_{name}"), rec.sqrt());
            m.insert(format!("phasor.amp_rmse_{name}"), amp.sqrt());
            m.insert(format!("phasor.angle_rmse_{name}_deg"), ang.sqrt());
        }
    }
    m
}
