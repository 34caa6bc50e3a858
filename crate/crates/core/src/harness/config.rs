use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::genome::SearchSpace;
use crate::rng::derive_seed;
use crate::simulator::EffectTable;

/// Experiment file, TOML:
///
/// ```toml
/// replications = 100
/// master_seed = 1
///
/// [evolution]
/// mode = "mab_ea"
/// policy = "ts"
///
/// [table.generate]
/// space = [5, 4, 2, 3, 4, 3, 3, 4]
/// base_rate = 0.05
/// range = [-0.01, 0.01]
/// seed = 7
/// count = 5
/// ```
///
/// `[table] path = "t.json"` loads a saved table instead; relative paths are
/// resolved against the config file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub replications: u64,
    pub master_seed: u64,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    pub table: TableSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableSource {
    Path(PathBuf),
    Generate(TableGeneration),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableGeneration {
    pub space: SearchSpace,
    #[serde(default = "default_base_rate")]
    pub base_rate: f64,
    #[serde(default = "default_range")]
    pub range: (f64, f64),
    pub seed: u64,
    /// Number of tables; table `i` is generated from `derive_seed(seed, i)`.
    #[serde(default = "one")]
    pub count: usize,
}

fn default_base_rate() -> f64 {
    0.05
}

fn default_range() -> (f64, f64) {
    (-0.01, 0.01)
}

fn one() -> usize {
    1
}

impl TableGeneration {
    pub fn tables(&self) -> Result<Vec<EffectTable>> {
        if self.count == 0 {
            return Err(Error::InvalidConfig("table count must be at least 1".into()));
        }
        (0..self.count as u64)
            .map(|i| {
                EffectTable::generate(
                    self.space.clone(),
                    self.base_rate,
                    self.range,
                    derive_seed(self.seed, i),
                )
            })
            .collect()
    }
}

impl ExperimentConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s)?;
        cfg.evolution.validate()?;
        Ok(cfg)
    }

    /// Reads a config file and makes a relative table path absolute.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml(&fs::read_to_string(path)?)?;
        if let TableSource::Path(p) = &mut cfg.table {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn tables(&self) -> Result<Vec<EffectTable>> {
        match &self.table {
            TableSource::Path(p) => Ok(vec![EffectTable::load(p)?]),
            TableSource::Generate(g) => g.tables(),
        }
    }
}
