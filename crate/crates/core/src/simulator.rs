//! Synthetic website traffic.
//!
//! A design's conversion rate is a base rate plus one additive effect per
//! chosen element value, clamped to `[0, 1]`. Each visit is an independent
//! Bernoulli trial at that rate.

use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::Environment;
use crate::genome::{Genome, SearchSpace};
use crate::rng::seeded;

/// Largest space [`EffectTable::enumerate`] will scan.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

/// Ground-truth effects of every element choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableFile", into = "TableFile")]
pub struct EffectTable {
    space: SearchSpace,
    base_rate: f64,
    effects: Vec<Vec<f64>>,
    seed: Option<u64>,
}

/// On-disk layout; validated into an [`EffectTable`] on load.
#[derive(Serialize, Deserialize)]
struct TableFile {
    space: SearchSpace,
    base_rate: f64,
    effects: Vec<Vec<f64>>,
    seed: Option<u64>,
}

impl TryFrom<TableFile> for EffectTable {
    type Error = Error;

    fn try_from(f: TableFile) -> Result<Self> {
        EffectTable::new(f.space, f.base_rate, f.effects, f.seed)
    }
}

impl From<EffectTable> for TableFile {
    fn from(t: EffectTable) -> Self {
        TableFile {
            space: t.space,
            base_rate: t.base_rate,
            effects: t.effects,
            seed: t.seed,
        }
    }
}

impl EffectTable {
    pub fn new(
        space: SearchSpace,
        base_rate: f64,
        effects: Vec<Vec<f64>>,
        seed: Option<u64>,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&base_rate) {
            return Err(Error::InvalidConfig(format!("base rate {base_rate} outside [0, 1]")));
        }
        if effects.len() != space.elements() {
            return Err(Error::ShapeMismatch(format!(
                "{} effect rows for {} elements",
                effects.len(),
                space.elements()
            )));
        }
        for (e, (row, &count)) in effects.iter().zip(space.choice_counts()).enumerate() {
            if row.len() != count as usize {
                return Err(Error::ShapeMismatch(format!(
                    "element {e} has {count} choices but {} effects",
                    row.len()
                )));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidConfig(format!("element {e} has a non-finite effect")));
            }
        }
        Ok(Self {
            space,
            base_rate,
            effects,
            seed,
        })
    }

    /// Table where every choice has zero effect.
    pub fn identity(space: SearchSpace, base_rate: f64) -> Result<Self> {
        let effects = space.choice_counts().iter().map(|&c| vec![0.0; c as usize]).collect();
        Self::new(space, base_rate, effects, None)
    }

    /// [`generate_table`] from a fresh stream seeded with `seed`; the seed is
    /// stored so the table can be regenerated.
    pub fn generate(space: SearchSpace, base_rate: f64, range: (f64, f64), seed: u64) -> Result<Self> {
        let mut table = generate_table(space, base_rate, range, &mut seeded(seed))?;
        table.seed = Some(seed);
        Ok(table)
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn base_rate(&self) -> f64 {
        self.base_rate
    }

    pub fn effects(&self) -> &[Vec<f64>] {
        &self.effects
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn check(&self, genome: &Genome) -> Result<()> {
        if self.space.contains(genome) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{genome} is not a design of {:?}",
                self.space.choice_counts()
            )))
        }
    }

    /// Rate of a genome already known to belong to the space.
    fn rate(&self, genome: &Genome) -> f64 {
        let lift: f64 = genome
            .choices()
            .iter()
            .zip(&self.effects)
            .map(|(&c, row)| row[c as usize])
            .sum();
        (self.base_rate + lift).clamp(0.0, 1.0)
    }

    pub fn true_rate(&self, genome: &Genome) -> Result<f64> {
        self.check(genome)?;
        Ok(self.rate(genome))
    }

    pub fn visit<R: Rng + ?Sized>(&self, genome: &Genome, rng: &mut R) -> Result<bool> {
        self.check(genome)?;
        Ok(bernoulli(self.rate(genome), rng))
    }

    /// Exhaustive scan of the design space.
    pub fn enumerate(&self) -> Result<EnumerationSummary> {
        let count = self.space.design_count();
        if count > ENUMERATION_LIMIT {
            return Err(Error::EnumerationLimit {
                count,
                limit: ENUMERATION_LIMIT,
            });
        }
        // Deviations from the base keep an all-zero table exact.
        let mut deviation = 0.0;
        let mut best: Option<(Genome, f64)> = None;
        for g in self.space.designs() {
            let r = self.rate(&g);
            deviation += r - self.base_rate;
            if best.as_ref().is_none_or(|(_, b)| r > *b) {
                best = Some((g, r));
            }
        }
        let (best_genome, best_rate) = best.expect("spaces are non-empty");
        Ok(EnumerationSummary {
            design_count: count as u64,
            mean_rate: self.base_rate + deviation / count as f64,
            best_rate,
            best_genome,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

fn bernoulli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> bool {
    rng.random::<f64>() < p
}

impl Environment for EffectTable {
    fn space(&self) -> &SearchSpace {
        &self.space
    }

    /// # Panics
    ///
    /// If the genome does not belong to the table's space; drivers only
    /// produce genomes of the configured space.
    fn visit<R: Rng + ?Sized>(&self, genome: &Genome, rng: &mut R) -> bool {
        debug_assert!(self.space.contains(genome));
        bernoulli(self.rate(genome), rng)
    }
}

/// Draws every effect uniformly from `[lo, hi]`.
pub fn generate_table<R: Rng + ?Sized>(
    space: SearchSpace,
    base_rate: f64,
    (lo, hi): (f64, f64),
    rng: &mut R,
) -> Result<EffectTable> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidConfig(format!("effect range [{lo}, {hi}] is empty")));
    }
    let effects = space
        .choice_counts()
        .iter()
        .map(|&c| {
            (0..c)
                .map(|_| if lo < hi { rng.random_range(lo..=hi) } else { lo })
                .collect()
        })
        .collect();
    EffectTable::new(space, base_rate, effects, None)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationSummary {
    pub design_count: u64,
    pub mean_rate: f64,
    pub best_rate: f64,
    /// Lexicographically smallest design among those attaining `best_rate`.
    pub best_genome: Genome,
}
