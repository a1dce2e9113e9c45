use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, Parser, Subcommand};
use quatfreq_cli::commands::{cmd_bench, cmd_estimate, cmd_phasor, cmd_simulate, summarize};
use quatfreq_cli::config::{load_preset, load_scenario, parse_estimators, RunConfig, Source, TuningOverrides};

#[derive(Parser)]
#[command(name = "quatfreq", version, about = "Three-phase grid frequency estimation with complex and quaternion Kalman filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the scenario's sampled voltages to frames.csv.
    Simulate(Common),
    /// Run estimators over one stream; writes trace.csv and metrics.txt.
    Estimate(Common),
    /// Monte Carlo metrics over noise seeds; writes bench.txt.
    Bench(Common),
    /// Estimate with phasor recovery; writes trace.csv and metrics.txt.
    Phasor(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with_all = ["preset", "input"])]
    scenario: Option<PathBuf>,
    /// Built-in scenario: balanced, sag, unbalanced or ramp.
    #[arg(long, conflicts_with = "input")]
    preset: Option<String>,
    /// Recorded `t,va,vb,vc` CSV instead of a scenario.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value = "lss,wlss,qss")]
    estimators: String,
    /// Noise seed; defaults to the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Output directory (must exist).
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the scenario SNR; `inf` disables noise.
    #[arg(long)]
    snr_db: Option<f64>,
    /// State noise on the frequency-bearing states.
    #[arg(long)]
    cr: Option<f64>,
    /// Observation noise variance.
    #[arg(long)]
    cs: Option<f64>,
    /// Initial covariance scale.
    #[arg(long)]
    m0: Option<f64>,
    /// Phasor low-pass cutoff, Hz.
    #[arg(long, default_value_t = 10.0)]
    lpf_hz: f64,
    /// Number of cascaded first-order low-pass stages.
    #[arg(long, default_value_t = 2)]
    lpf_stages: usize,
    /// Add phasor columns to the estimate trace.
    #[arg(long)]
    phasors: bool,
}

impl Common {
    fn into_config(self) -> anyhow::Result<RunConfig> {
        let source = match (self.scenario, self.preset, self.input) {
            (Some(path), _, _) => Source::Scenario(load_scenario(&path)?),
            (None, Some(name), _) => Source::Scenario(load_preset(&name)?),
            (None, None, Some(path)) => Source::Recording(path),
            (None, None, None) => bail!("one of --scenario, --preset or --input is required"),
        };
        let source = match source {
            Source::Scenario(mut spec) => {
                if let Some(snr) = self.snr_db {
                    spec.snr_db = Some(snr);
                }
                Source::Scenario(spec)
            }
            other => other,
        };
        let default_seed = match &source {
            Source::Scenario(spec) => spec.seed,
            Source::Recording(_) => 0,
        };
        let mut config = RunConfig::new(source);
        config.estimators = parse_estimators(&self.estimators)?;
        config.seed = self.seed.unwrap_or(default_seed);
        config.trials = self.trials;
        config.out = self.out;
        config.tuning = TuningOverrides {
            m0: self.m0,
            cr: self.cr,
            cs: self.cs,
        };
        config.lpf_hz = self.lpf_hz;
        config.lpf_stages = self.lpf_stages;
        config.phasors = self.phasors;
        config.validate()?;
        Ok(config)
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Simulate(c) => {
            let path = cmd_simulate(&c.into_config()?)?;
            println!("wrote {}", path.display());
        }
        Command::Estimate(c) => {
            let out = cmd_estimate(&c.into_config()?)?;
            println!("wrote {} and {}", out.trace_path.display(), out.metrics_path.display());
        }
        Command::Phasor(c) => {
            let out = cmd_phasor(&c.into_config()?)?;
            println!("wrote {} and {}", out.trace_path.display(), out.metrics_path.display());
        }
        Command::Bench(c) => {
            let config = c.into_config()?;
            let (report, path) = cmd_bench(&config)?;
            print!("{}", summarize(&report, &config));
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
