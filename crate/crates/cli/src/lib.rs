//! Scenario simulation, estimation runs, phasor recovery and Monte Carlo
//! metrics for the `quatfreq` command.

pub mod commands;
pub mod config;
pub mod metrics;
pub mod pipeline;

pub use commands::{cmd_bench, cmd_estimate, cmd_phasor, cmd_simulate};
pub use config::{RunConfig, Source, TuningOverrides};
pub use metrics::MetricsReport;
pub use pipeline::{run_trial, Trace};
