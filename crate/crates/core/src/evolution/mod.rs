//! Evolutionary drivers whose fitness evaluations are bandit-allocated.
//!
//! | mode           | elites survive | duplicate check      | statistics            |
//! |----------------|----------------|----------------------|-----------------------|
//! | `mab_ea`       | yes            | all evaluated so far | zeroed per generation |
//! | `bai`          | no (pooled)    | all evaluated so far | zeroed per generation |
//! | `campaign`     | all but worst  | current population   | carried (or zeroed)   |
//! | `neighborhood` | yes            | all evaluated so far | zeroed per generation |

mod campaign;
mod config;
mod generational;
mod neighborhood;

pub use campaign::run_campaign;
pub use config::{EvolutionConfig, Mode};
pub use generational::{run_bai_mode, run_mab_ea, run_neighborhood, EliteEntry, ElitePool};
pub use neighborhood::neighborhood_fitness;

use rand::{Rng, SeedableRng};

use crate::bandit::{run_policy, ArmState, Policy, SharedState};
use crate::error::{Error, Result};
use crate::genome::{fitness_proportionate_select, mutate, uniform_crossover, Genome, SearchSpace};
use crate::rng::ChaCha8Rng;

/// Where visits to a design are answered.
pub trait Environment {
    fn space(&self) -> &SearchSpace;

    /// One visitor shown `genome`; `true` if they converted.
    fn visit<R: Rng + ?Sized>(&self, genome: &Genome, rng: &mut R) -> bool;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub genome: Genome,
    /// Generation-local in `mab_ea`/`bai`, cumulative in asynchronous campaigns.
    pub arm: ArmState,
    pub birth_generation: usize,
}

impl Candidate {
    pub fn new(genome: Genome, birth_generation: usize) -> Self {
        Self {
            genome,
            arm: ArmState::new(),
            birth_generation,
        }
    }

    /// `s / n`, 0 when the candidate was never shown.
    pub fn fitness(&self) -> f64 {
        self.arm.empirical_mean()
    }
}

/// An evaluated generation.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationSnapshot {
    /// 1-based.
    pub generation: usize,
    pub population: Vec<Candidate>,
    /// The fitness the driver ranked by (neighborhood estimates in that mode).
    pub fitness: Vec<f64>,
    /// Visits spent this generation.
    pub visits: u64,
    /// Conversions observed this generation.
    pub conversions: u64,
    /// In `bai` mode: the design the best-arm phase picks from the elite pool
    /// as it stands after this generation.
    pub recommended: Option<Genome>,
}

impl GenerationSnapshot {
    /// Position of the highest measured fitness, lowest index on ties.
    pub fn best_index(&self) -> usize {
        crate::bandit::argmax(self.fitness.iter().copied()).unwrap_or(0)
    }

    /// The design this generation would hand out as its winner.
    pub fn winner(&self) -> &Genome {
        self.recommended
            .as_ref()
            .unwrap_or(&self.population[self.best_index()].genome)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaiResult {
    pub winner: Genome,
    /// Empirical fitness of the winner inside the best-arm phase.
    pub winner_fitness: f64,
    pub pool: Vec<EliteEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub generations: Vec<GenerationSnapshot>,
    /// Population built after the last generation; never evaluated.
    pub next_population: Vec<Genome>,
    /// Set when a fill loop ran out of fresh designs and accepted duplicates.
    pub duplicate_padding: bool,
    pub bai: Option<BaiResult>,
}

/// Runs whichever driver `cfg.mode` names.
pub fn run<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
) -> Result<RunOutcome> {
    match cfg.mode {
        Mode::MabEa => run_mab_ea(cfg, env, rng),
        Mode::Bai => run_bai_mode(cfg, env, rng),
        Mode::Campaign => run_campaign(cfg, env, rng),
        Mode::Neighborhood => run_neighborhood(cfg, env, rng),
    }
}

/// `ceil(K * C / 100)`, at least 1.
pub fn percentile_count(population: usize, percent: f64) -> usize {
    ((population as f64 * percent / 100.0).ceil() as usize).max(1)
}

/// Indices ordered best first; ties keep the lower index first.
pub(crate) fn rank_best_first(fitness: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..fitness.len()).collect();
    order.sort_by(|&a, &b| fitness[b].total_cmp(&fitness[a]));
    order
}

/// Independent streams for one run, all derived from the caller's rng.
pub(crate) struct Streams {
    pub breed: ChaCha8Rng,
    pub policy: ChaCha8Rng,
    pub visits: ChaCha8Rng,
    pub probe: ChaCha8Rng,
}

impl Streams {
    pub fn derive<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut next = || ChaCha8Rng::seed_from_u64(rng.random());
        Self {
            breed: next(),
            policy: next(),
            visits: next(),
            probe: next(),
        }
    }
}

/// Spends one generation's budget on `population`, updating each arm in place.
/// Returns `(visits, conversions)` for this call only.
pub(crate) fn evaluate<E: Environment>(
    policy: Policy,
    population: &mut [Candidate],
    shared: &mut SharedState,
    budget: u64,
    env: &E,
    streams: &mut Streams,
) -> Result<(u64, u64)> {
    let mut arms: Vec<ArmState> = population.iter().map(|c| c.arm).collect();
    let mut conversions = 0;
    {
        let genomes: Vec<&Genome> = population.iter().map(|c| &c.genome).collect();
        let visits = &mut streams.visits;
        let mut source = |i: usize| {
            let r = env.visit(genomes[i], visits);
            conversions += r as u64;
            r
        };
        run_policy(policy, &mut arms, shared, budget, &mut source, &mut streams.policy)?;
    }
    for (c, a) in population.iter_mut().zip(arms) {
        c.arm = a;
    }
    Ok((budget, conversions))
}

/// Selection, crossover and mutation for one offspring.
pub(crate) fn breed<R: Rng + ?Sized>(
    parents: &[(&Genome, f64)],
    space: &SearchSpace,
    mutation_prob: f64,
    rng: &mut R,
) -> Result<Genome> {
    let fitness: Vec<f64> = parents.iter().map(|p| p.1).collect();
    let (a, b) = fitness_proportionate_select(&fitness, rng)?;
    let child = uniform_crossover(parents[a].0, parents[b].0, rng)?;
    mutate(&child, space, mutation_prob, rng)
}

/// Consecutive duplicate rejections tolerated before a fill loop pads.
pub(crate) fn rejection_limit(population: usize) -> usize {
    100 * population
}

/// Draws `count` designs that `is_fresh` accepts (and records), padding with
/// duplicates once the rejection limit is hit. Returns whether it padded.
pub(crate) fn fill<R, G, F>(
    count: usize,
    limit: usize,
    rng: &mut R,
    mut propose: G,
    mut is_fresh: F,
    out: &mut Vec<Genome>,
) -> Result<bool>
where
    R: Rng + ?Sized,
    G: FnMut(&mut R) -> Result<Genome>,
    F: FnMut(&Genome) -> bool,
{
    let target = out.len() + count;
    let mut rejected = 0;
    let mut padding = false;
    while out.len() < target {
        let g = propose(rng)?;
        if is_fresh(&g) || padding {
            out.push(g);
            rejected = 0;
        } else {
            rejected += 1;
            if rejected >= limit {
                padding = true;
            }
        }
    }
    Ok(padding)
}

pub(crate) fn check_mode(cfg: &EvolutionConfig, mode: Mode) -> Result<()> {
    cfg.validate()?;
    if cfg.mode != mode {
        return Err(Error::InvalidConfig(format!(
            "driver for {mode} called with mode {}",
            cfg.mode
        )));
    }
    Ok(())
}
