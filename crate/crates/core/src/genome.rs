//! Categorical design encoding and the variation operators.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Choice counts of the eight-element landing page used in the experiments.
pub const LANDING_PAGE_CHOICES: [u32; 8] = [5, 4, 2, 3, 4, 3, 3, 4];

/// Number of choices available for each design element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SearchSpace {
    choice_counts: Vec<u32>,
}

impl SearchSpace {
    pub fn new(choice_counts: Vec<u32>) -> Result<Self> {
        if choice_counts.is_empty() {
            return Err(Error::InvalidSpace("no design elements".into()));
        }
        if let Some(e) = choice_counts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSpace(format!("element {e} has no choices")));
        }
        Ok(Self { choice_counts })
    }

    pub fn landing_page() -> Self {
        Self {
            choice_counts: LANDING_PAGE_CHOICES.to_vec(),
        }
    }

    pub fn choice_counts(&self) -> &[u32] {
        &self.choice_counts
    }

    pub fn elements(&self) -> usize {
        self.choice_counts.len()
    }

    /// Product of the choice counts, saturating at `u128::MAX`.
    pub fn design_count(&self) -> u128 {
        self.choice_counts
            .iter()
            .try_fold(1u128, |acc, &c| acc.checked_mul(c as u128))
            .unwrap_or(u128::MAX)
    }

    pub fn contains(&self, genome: &Genome) -> bool {
        genome.0.len() == self.choice_counts.len()
            && genome.0.iter().zip(&self.choice_counts).all(|(g, c)| g < c)
    }

    /// Every design in lexicographic order, first element slowest.
    pub fn designs(&self) -> Designs<'_> {
        Designs {
            space: self,
            next: Some(vec![0; self.elements()]),
        }
    }
}

impl TryFrom<Vec<u32>> for SearchSpace {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SearchSpace> for Vec<u32> {
    fn from(s: SearchSpace) -> Self {
        s.choice_counts
    }
}

/// Odometer over all designs of a space.
pub struct Designs<'a> {
    space: &'a SearchSpace,
    next: Option<Vec<u32>>,
}

impl Iterator for Designs<'_> {
    type Item = Genome;

    fn next(&mut self) -> Option<Genome> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for e in (0..succ.len()).rev() {
            succ[e] += 1;
            if succ[e] < self.space.choice_counts[e] {
                self.next = Some(succ);
                break;
            }
            succ[e] = 0;
        }
        Some(Genome(current))
    }
}

/// One design: a choice index per element. The tuple of indices is also
/// the canonical archive key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Genome(Vec<u32>);

impl Genome {
    pub fn new(space: &SearchSpace, choices: Vec<u32>) -> Result<Self> {
        let g = Genome(choices);
        if space.contains(&g) {
            Ok(g)
        } else {
            Err(Error::ShapeMismatch(format!("{g} is not a design of {:?}", space.choice_counts)))
        }
    }

    pub fn choices(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of elements whose choices differ.
    pub fn hamming(&self, other: &Genome) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
            + self.0.len().abs_diff(other.0.len())
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub fn random_genome<R: Rng + ?Sized>(space: &SearchSpace, rng: &mut R) -> Genome {
    Genome(
        space
            .choice_counts
            .iter()
            .map(|&c| rng.random_range(0..c))
            .collect(),
    )
}

/// Each element is copied from either parent with probability 1/2.
pub fn uniform_crossover<R: Rng + ?Sized>(
    first: &Genome,
    second: &Genome,
    rng: &mut R,
) -> Result<Genome> {
    if first.len() != second.len() {
        return Err(Error::ShapeMismatch(format!(
            "parents have {} and {} elements",
            first.len(),
            second.len()
        )));
    }
    Ok(Genome(
        first
            .0
            .iter()
            .zip(&second.0)
            .map(|(&a, &b)| if rng.random::<bool>() { a } else { b })
            .collect(),
    ))
}

/// Alters each element with probability `rate`. An altered element takes a
/// uniformly drawn *different* choice, so single-choice elements never change.
pub fn mutate<R: Rng + ?Sized>(
    genome: &Genome,
    space: &SearchSpace,
    rate: f64,
    rng: &mut R,
) -> Result<Genome> {
    if !space.contains(genome) {
        return Err(Error::ShapeMismatch(format!("{genome} is not in the search space")));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::InvalidConfig(format!("mutation probability {rate} outside [0, 1]")));
    }
    let choices = genome
        .0
        .iter()
        .zip(&space.choice_counts)
        .map(|(&g, &count)| {
            if count < 2 || !rng.random_bool(rate) {
                return g;
            }
            let draw = rng.random_range(0..count - 1);
            if draw >= g {
                draw + 1
            } else {
                draw
            }
        })
        .collect();
    Ok(Genome(choices))
}

/// Picks two distinct pool positions with probability proportional to
/// fitness, the second draw renormalized over what is left. An all-zero
/// profile falls back to uniform draws.
pub fn fitness_proportionate_select<R: Rng + ?Sized>(
    fitness: &[f64],
    rng: &mut R,
) -> Result<(usize, usize)> {
    if fitness.len() < 2 {
        return Err(Error::PoolTooSmall(fitness.len()));
    }
    if let Some(f) = fitness.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
        return Err(Error::InvalidConfig(format!("fitness {f} is not a non-negative number")));
    }
    let first = roulette(fitness, None, rng);
    let second = roulette(fitness, Some(first), rng);
    Ok((first, second))
}

fn roulette<R: Rng + ?Sized>(fitness: &[f64], skip: Option<usize>, rng: &mut R) -> usize {
    let eligible = || (0..fitness.len()).filter(move |&i| Some(i) != skip);
    let total: f64 = eligible().map(|i| fitness[i]).sum();
    if total <= 0.0 {
        let n = eligible().count();
        return eligible().nth(rng.random_range(0..n)).expect("n > 0");
    }
    let mut ticket = rng.random::<f64>() * total;
    let mut last = 0;
    for i in eligible() {
        if fitness[i] <= 0.0 {
            continue;
        }
        last = i;
        if ticket < fitness[i] {
            return i;
        }
        ticket -= fitness[i];
    }
    // Rounding left a sliver past the end; it belongs to the last positive entry.
    last
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insertion {
    Fresh,
    Duplicate,
}

/// Exact set of genomes already evaluated.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    seen: HashSet<Genome>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn check_insert(&mut self, genome: &Genome) -> Insertion {
        if self.seen.contains(genome) {
            Insertion::Duplicate
        } else {
            self.seen.insert(genome.clone());
            Insertion::Fresh
        }
    }

    pub fn contains(&self, genome: &Genome) -> bool {
        self.seen.contains(genome)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}
