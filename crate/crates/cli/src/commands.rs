use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;
use quatfreq_core::signal::{simulate, write_frames};

use crate::config::{RunConfig, Source};
use crate::metrics::{trial_metrics, MetricsReport};
use crate::pipeline::{run_trial, write_trace, Trace};

pub const FRAMES_FILE: &str = "frames.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const METRICS_FILE: &str = "metrics.txt";
pub const BENCH_FILE: &str = "bench.txt";

fn create(dir: &Path, name: &str) -> anyhow::Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn finish(path: &Path, mut w: BufWriter<File>) -> anyhow::Result<()> {
    w.flush().with_context(|| format!("writing {}", path.display()))
}

/// Writes the simulated frames (noise seed `config.seed`) to `frames.csv`.
pub fn cmd_simulate(config: &RunConfig) -> anyhow::Result<PathBuf> {
    let Source::Scenario(spec) = &config.source else {
        bail!("simulate needs a scenario, not a recording");
    };
    let mut spec = spec.clone();
    spec.seed = config.seed;
    let frames = simulate(&spec)?;
    let (path, mut w) = create(&config.out, FRAMES_FILE)?;
    write_frames(&mut w, &frames).with_context(|| format!("writing {}", path.display()))?;
    finish(&path, w)?;
    Ok(path)
}

/// Result of a single estimation run.
#[derive(Debug)]
pub struct EstimateOutput {
    pub trace: Trace,
    pub metrics: MetricsReport,
    pub trace_path: PathBuf,
    pub metrics_path: PathBuf,
}

/// Runs the selected estimators over one stream and writes `trace.csv` and
/// `metrics.txt`.
pub fn cmd_estimate(config: &RunConfig) -> anyhow::Result<EstimateOutput> {
    config.validate()?;
    let trace = run_trial(config, 0)?;
    let metrics = trial_metrics(&trace, &config.metrics);
    let (trace_path, mut w) = create(&config.out, TRACE_FILE)?;
    write_trace(&mut w, &trace).with_context(|| format!("writing {}", trace_path.display()))?;
    finish(&trace_path, w)?;
    let (metrics_path, mut w) = create(&config.out, METRICS_FILE)?;
    metrics.write(&mut w)?;
    finish(&metrics_path, w)?;
    Ok(EstimateOutput {
        trace,
        metrics,
        trace_path,
        metrics_path,
    })
}

/// [`cmd_estimate`] with phasor recovery enabled.
pub fn cmd_phasor(config: &RunConfig) -> anyhow::Result<EstimateOutput> {
    let mut config = config.clone();
    config.phasors = true;
    cmd_estimate(&config)
}

/// Per-trial metrics of a Monte Carlo batch, in trial order.
pub fn monte_carlo(config: &RunConfig) -> anyhow::Result<Vec<MetricsReport>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|k| Ok(trial_metrics(&run_trial(config, k)?, &config.metrics)))
        .collect()
}

/// Aggregated Monte Carlo metrics, also written to `bench.txt`.
pub fn cmd_bench(config: &RunConfig) -> anyhow::Result<(MetricsReport, PathBuf)> {
    if matches!(config.source, Source::Recording(_)) {
        bail!("bench needs a scenario, not a recording");
    }
    let report = MetricsReport::aggregate(&monte_carlo(config)?);
    let (path, mut w) = create(&config.out, BENCH_FILE)?;
    report.write(&mut w)?;
    finish(&path, w)?;
    Ok((report, path))
}

/// Short human-readable digest of a bench report.
pub fn summarize(report: &MetricsReport, config: &RunConfig) -> String {
    let mut s = format!("{} trials\n", config.trials);
    for kind in &config.estimators {
        let get = |k: &str| report.get(&format!("{kind}.{k}")).unwrap_or(f64::NAN);
        s.push_str(&format!(
            "{kind:>5}: steady MSE {:.2} ± {:.2} dB, RMSE {:.4} Hz, convergence {:.3} s, diverged {:.0}%\n",
            get("steady_mse_db.mean"),
            get("steady_mse_db.std"),
            get("steady_rmse_hz.mean"),
            get("convergence_time_s.mean"),
            100.0 * get("diverged.mean"),
        ));
    }
    s
}
