use crate::error::{HarnessError, HarnessResult};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

/// One experiment run. Fields other than `schema`, `experiment` and `seed`
/// are optional; each experiment fills the gaps with its own defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub experiment: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<String>,
    /// Inclusive level range.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Output directory for the CSV and JSON files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn new(experiment: &str, seed: u64) -> Self {
        ExperimentConfig {
            schema: SCHEMA_VERSION,
            experiment: experiment.into(),
            seed,
            system: None,
            basis: None,
            levels: None,
            samples: None,
            trials: None,
            out: None,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn from_json(text: &str, origin: &Path) -> HarnessResult<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|source| HarnessError::Json { path: origin.to_path_buf(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> HarnessResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.into(), source })?;
        Self::from_json(&text, path)
    }

    pub fn validate(&self) -> HarnessResult<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.schema != SCHEMA_VERSION {
            return bad(format!("schema {} is not supported (expected {SCHEMA_VERSION})", self.schema));
        }
        if let Some([lo, hi]) = self.levels {
            if lo > hi {
                return bad(format!("level range [{lo}, {hi}] is empty"));
            }
        }
        if let Some(s) = &self.samples {
            if s.is_empty() || s.contains(&0) {
                return bad("sample counts must be a nonempty list of positive integers".into());
            }
        }
        if self.trials == Some(0) {
            return bad("trials must be positive".into());
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v >= 0.0) {
                return bad(format!("tolerance '{k}' must be a finite nonnegative number"));
            }
        }
        if let Some(name) = &self.system {
            koopman_core::transfer::system_registry(name).map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    pub fn levels_or(&self, lo: u32, hi: u32) -> std::ops::RangeInclusive<u32> {
        let [a, b] = self.levels.unwrap_or([lo, hi]);
        a..=b
    }

    pub fn samples_or(&self, default: &[usize]) -> Vec<usize> {
        self.samples.clone().unwrap_or_else(|| default.to_vec())
    }

    pub fn system_or(&self, default: &str) -> String {
        self.system.clone().unwrap_or_else(|| default.to_string())
    }
}
