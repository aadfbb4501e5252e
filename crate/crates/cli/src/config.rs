//! Run configuration: one JSON document, every field optional.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use lhv_photons::bell::{ChshSetting, MIN_GRID};
use lhv_photons::counts::{SamplerSpec, YConvention};
use lhv_photons::model::{DetectorKind, ExperimentConfig};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LHV_PHOTONS_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: OutputFormat,
    /// Destination file; `None` writes to the default directory or stdout.
    pub path: Option<PathBuf>,
}

/// Where CHSH correlations come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationSource {
    /// `−sin(θi − θj)` from the time-averaged intensities.
    #[default]
    Analytic,
    /// Monte Carlo covariance of the ±1 counts.
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChshOptions {
    pub source: CorrelationSource,
    /// Phases per axis in the exhaustive search.
    pub grid: usize,
    pub setting: ChshSetting,
}

impl Default for ChshOptions {
    fn default() -> Self {
        Self {
            source: CorrelationSource::Analytic,
            grid: 16,
            setting: ChshSetting::maximal(),
        }
    }
}

/// Inclusive sweep over `θi − θj`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepRange {
    pub start: f64,
    pub end: f64,
    pub step: f64,
}

impl Default for SweepRange {
    fn default() -> Self {
        Self {
            start: 0.0,
            end: TAU,
            step: PI / 8.0,
        }
    }
}

impl SweepRange {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.step.is_finite()) {
            return Err(HarnessError::field(
                "sweep",
                "start, end and step must be finite",
            ));
        }
        if self.step <= 0.0 {
            return Err(HarnessError::field(
                "sweep.step",
                "empty range: step must be positive",
            ));
        }
        if self.end < self.start {
            return Err(HarnessError::field(
                "sweep.end",
                "empty range: end lies before start",
            ));
        }
        Ok(())
    }

    /// Sweep points `start + k·step` up to `end` (with a small tolerance).
    pub fn points(&self) -> Vec<f64> {
        let count = ((self.end - self.start) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentConfig,
    pub detector_model: DetectorKind,
    pub sampler: SamplerSpec,
    /// Worker threads for Monte Carlo; 0 uses every core.
    pub workers: usize,
    pub y_convention: YConvention,
    pub chsh: ChshOptions,
    pub sweep: SweepRange,
    pub output: OutputSpec,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig =
            serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Parse {
                field: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        cfg.validated()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    /// Checks every section and reduces phases.
    pub fn validated(mut self) -> Result<Self> {
        self.experiment = self
            .experiment
            .normalized()
            .map_err(|e| HarnessError::model_field("experiment", e))?;
        self.sampler
            .validate()
            .map_err(|e| HarnessError::model_field("sampler", e))?;
        if self.chsh.grid < MIN_GRID {
            return Err(HarnessError::field(
                "chsh.grid",
                format!("must be at least {MIN_GRID}, got {}", self.chsh.grid),
            ));
        }
        let s = self.chsh.setting;
        if ![s.a, s.a_prime, s.b, s.b_prime]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(HarnessError::field("chsh.setting", "phases must be finite"));
        }
        self.chsh.setting = ChshSetting::new(s.a, s.a_prime, s.b, s.b_prime);
        self.sweep.validate()?;
        Ok(self)
    }
}
