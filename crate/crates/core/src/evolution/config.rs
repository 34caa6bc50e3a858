use std::fmt;

use serde::{Deserialize, Serialize};

use super::percentile_count;
use crate::bandit::Policy;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MabEa,
    Bai,
    Campaign,
    Neighborhood,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::MabEa => "mab_ea",
            Mode::Bai => "bai",
            Mode::Campaign => "campaign",
            Mode::Neighborhood => "neighborhood",
        })
    }
}

/// Control parameters shared by every driver. Defaults are the experimental
/// settings: K = 20, T = 10,000, C_e = C_p = 20, C_m = 0.01, 10 generations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// K
    pub population_size: usize,
    /// G_max
    pub generations: usize,
    /// T
    pub traffic_per_generation: u64,
    /// C_e, in percent.
    pub elite_percent: f64,
    /// C_p, in percent.
    pub parent_percent: f64,
    /// C_m, per element.
    pub mutation_prob: f64,
    pub policy: Policy,
    pub mode: Mode,
    /// K_e
    pub bai_elite_size: usize,
    /// T_e
    pub bai_traffic: u64,
    pub neighborhood_size: usize,
    /// Campaign mode only: carry statistics of survivors across generations.
    pub asynchronous: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 20,
            generations: 10,
            traffic_per_generation: 10_000,
            elite_percent: 20.0,
            parent_percent: 20.0,
            mutation_prob: 0.01,
            policy: Policy::Thompson,
            mode: Mode::MabEa,
            bai_elite_size: 20,
            bai_traffic: 10_000,
            neighborhood_size: 5,
            asynchronous: true,
        }
    }
}

impl EvolutionConfig {
    pub fn elite_count(&self) -> usize {
        percentile_count(self.population_size, self.elite_percent)
    }

    pub fn parent_count(&self) -> usize {
        percentile_count(self.population_size, self.parent_percent)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        let k = self.population_size;
        if k < 2 {
            return fail(format!("population size {k} is below 2"));
        }
        if self.generations < 1 {
            return fail("at least one generation is required".into());
        }
        if self.traffic_per_generation < k as u64 {
            return fail(format!(
                "traffic per generation {} is below the population size {k}",
                self.traffic_per_generation
            ));
        }
        for (name, p) in [("elite", self.elite_percent), ("parent", self.parent_percent)] {
            if !(p > 0.0 && p <= 100.0) {
                return fail(format!("{name} percent {p} outside (0, 100]"));
            }
        }
        if !(0.0..=1.0).contains(&self.mutation_prob) {
            return fail(format!("mutation probability {} outside [0, 1]", self.mutation_prob));
        }
        if self.parent_count() < 2 {
            return fail(format!(
                "parent pool of {} cannot supply two distinct parents",
                self.parent_count()
            ));
        }
        if self.mode == Mode::Bai {
            if self.bai_elite_size < 2 {
                return fail(format!("elite pool size {} is below 2", self.bai_elite_size));
            }
            if self.bai_traffic < self.bai_elite_size as u64 {
                return fail(format!(
                    "best-arm traffic {} is below the elite pool size {}",
                    self.bai_traffic, self.bai_elite_size
                ));
            }
        }
        if self.mode == Mode::Neighborhood && self.neighborhood_size < 1 {
            return fail("neighborhood size must be at least 1".into());
        }
        Ok(())
    }
}
