//! Run configuration: one TOML document with a section per component.
//! Unknown keys are rejected by name.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::{SacConfig, TrainSchedule};
use crate::baselines::{RuleError, RuleParams};
use crate::data::{load_csv, synthesize, CsvSchema, DataError, ExogenousSeries};
use crate::env::EnvConfig;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("cannot encode config: {0}")]
    Encode(#[from] toml::ser::Error),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Rules(#[from] RuleError),
    #[error("inconsistent config: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataSection {
    /// CSV file with timestamp, price, PV and temperature columns; when
    /// absent a synthetic series is generated.
    pub csv: Option<PathBuf>,
    pub schema: CsvSchema,
    pub synthetic_days: usize,
    pub seed: u64,
}

impl Default for DataSection {
    fn default() -> Self {
        Self { csv: None, schema: CsvSchema::default(), synthetic_days: 74, seed: 1 }
    }
}

impl DataSection {
    pub fn load(&self) -> Result<ExogenousSeries, DataError> {
        match &self.csv {
            Some(path) => load_csv(path, &self.schema),
            None => synthesize(self.synthetic_days, self.seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RuleSection {
    pub deadband_c: f64,
    pub low_percentile: f64,
    pub high_percentile: f64,
}

impl Default for RuleSection {
    fn default() -> Self {
        Self { deadband_c: 0.5, low_percentile: 0.3, high_percentile: 0.7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalSection {
    pub start_day: usize,
    pub days: usize,
    /// Departure SoC counted as satisfying the driver.
    pub departure_threshold: f64,
    /// Number of itinerary seeds evaluated (consecutive from the env seed).
    pub behavior_seeds: usize,
}

impl Default for EvalSection {
    fn default() -> Self {
        Self { start_day: 60, days: 14, departure_threshold: 0.78, behavior_seeds: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data: DataSection,
    pub env: EnvConfig,
    pub agent: SacConfig,
    pub train: TrainSchedule,
    pub rules: RuleSection,
    pub eval: EvalSection,
}

impl RunConfig {
    /// Settings sized for a laptop: smaller networks and batches, with
    /// rewards and costs scaled down to the range the critics fit quickly.
    pub fn desk_scale() -> Self {
        Self {
            agent: SacConfig {
                hidden: vec![64, 64],
                batch_size: 128,
                reward_scale: 0.05,
                cost_scale: 0.05,
                ..SacConfig::default()
            },
            ..Self::default()
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String, ConfigError> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Inconsistent(m));
        if self.train.train_days > self.eval.start_day {
            return bad(format!(
                "training days 0..{} overlap the evaluation span starting at day {}",
                self.train.train_days, self.eval.start_day
            ));
        }
        if !(0.0..1.0).contains(&self.rules.low_percentile) || self.rules.low_percentile >= self.rules.high_percentile {
            return bad("rule percentiles must satisfy 0 <= low < high <= 1".into());
        }
        if self.eval.days == 0 || self.eval.behavior_seeds == 0 {
            return bad("evaluation needs at least one day and one seed".into());
        }
        if self.agent.hidden.is_empty() || self.agent.batch_size == 0 {
            return bad("agent needs hidden layers and a positive batch size".into());
        }
        Ok(())
    }

    /// Rule parameters with thresholds from the training-period prices.
    pub fn rule_params(&self, series: &ExogenousSeries, allow_export: bool) -> Result<RuleParams, ConfigError> {
        let hours = (self.train.train_days * 24).min(series.len());
        let prices = &series.buy_prices()[..hours];
        let mut p = RuleParams::from_prices(prices, self.rules.low_percentile, self.rules.high_percentile, allow_export)?;
        p.deadband_c = self.rules.deadband_c;
        Ok(p)
    }
}
