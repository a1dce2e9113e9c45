use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use quatfreq_core::models::{EstimatorKind, Tuning};
use quatfreq_core::phasor::LowPassFilter;
use quatfreq_core::signal::{preset, ScenarioSpec, PRESETS};

/// Overrides of the default filter tuning. Unset fields keep defaults;
/// the observation noise is otherwise derived from the SNR and the signal
/// power of the first nominal cycle.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TuningOverrides {
    pub m0: Option<f64>,
    /// State noise on the frequency-bearing states of every model.
    pub cr: Option<f64>,
    pub cs: Option<f64>,
}

impl TuningOverrides {
    pub fn apply(&self, mut tuning: Tuning) -> Tuning {
        if let Some(m0) = self.m0 {
            tuning.m0 = m0;
        }
        if let Some(cr) = self.cr {
            tuning.cr_increment = cr;
            tuning.cr_weight = cr;
        }
        if let Some(cs) = self.cs {
            tuning.cs = cs;
        }
        tuning
    }
}

/// Where the frames come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Scenario(ScenarioSpec),
    Recording(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub source: Source,
    pub estimators: Vec<EstimatorKind>,
    pub tuning: TuningOverrides,
    pub lpf_hz: f64,
    pub lpf_stages: usize,
    pub phasors: bool,
    pub out: PathBuf,
    pub seed: u64,
    pub trials: usize,
    pub metrics: MetricSettings,
}

/// Windows and thresholds used by the metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricSettings {
    /// Convergence means `|error|` stays below this, Hz.
    pub convergence_threshold: f64,
    /// ... for at least this long, s.
    pub convergence_hold: f64,
    /// Fraction of each segment, counted from its end, that is steady state.
    pub steady_fraction: f64,
    /// Start of each segment excluded from the error spectrum, s.
    pub spectrum_skip: f64,
    /// Start of the record excluded from the tracking lag, s.
    pub burn_in: f64,
    /// Block length over which the tracking lag is averaged, s.
    pub lag_block: f64,
    /// Start of each segment excluded from phasor errors, s.
    pub phasor_settle: f64,
}

impl Default for MetricSettings {
    fn default() -> Self {
        Self {
            convergence_threshold: 0.1,
            convergence_hold: 0.1,
            steady_fraction: 1.0 / 3.0,
            spectrum_skip: 0.1,
            burn_in: 0.5,
            lag_block: 0.05,
            phasor_settle: 0.3,
        }
    }
}

impl RunConfig {
    pub fn new(source: Source) -> Self {
        Self {
            source,
            estimators: EstimatorKind::ALL.to_vec(),
            tuning: TuningOverrides::default(),
            lpf_hz: LowPassFilter::DEFAULT_CUTOFF_HZ,
            lpf_stages: LowPassFilter::DEFAULT_STAGES,
            phasors: false,
            out: PathBuf::from("."),
            seed: 0,
            trials: 1,
            metrics: MetricSettings::default(),
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        if self.estimators.is_empty() {
            bail!("select at least one estimator");
        }
        if self.trials == 0 {
            bail!("trial count must be at least 1");
        }
        if let Source::Scenario(spec) = &self.source {
            spec.validate()?;
        }
        Ok(())
    }

    pub fn scenario(&self) -> Option<&ScenarioSpec> {
        match &self.source {
            Source::Scenario(s) => Some(s),
            Source::Recording(_) => None,
        }
    }
}

/// Parses `lss,wlss,qss`, dropping duplicates and keeping canonical order.
pub fn parse_estimators(list: &str) -> anyhow::Result<Vec<EstimatorKind>> {
    let mut kinds = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<EstimatorKind>())
        .collect::<Result<Vec<_>, _>>()?;
    kinds.sort();
    kinds.dedup();
    Ok(kinds)
}

pub fn load_scenario(path: &Path) -> anyhow::Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading scenario {}", path.display()))?;
    let spec: ScenarioSpec =
        toml::from_str(&text).with_context(|| format!("parsing scenario {}", path.display()))?;
    spec.validate()
        .with_context(|| format!("validating scenario {}", path.display()))?;
    Ok(spec)
}

pub fn load_preset(name: &str) -> anyhow::Result<ScenarioSpec> {
    preset(name).with_context(|| {
        format!("unknown preset {name:?}; available: {}", PRESETS.join(", "))
    })
}
