//! Drivers that evaluate every generation from scratch: MAB-EA, best-arm
//! identification mode and the neighborhood-fitness baseline.

use rand::Rng;

use super::{
    breed, check_mode, evaluate, fill, neighborhood_fitness, rank_best_first, rejection_limit,
    BaiResult, Candidate, Environment, EvolutionConfig, GenerationSnapshot, Mode, RunOutcome,
    Streams,
};
use crate::bandit::{sr_run, ArmState, SharedState};
use crate::error::{Error, Result};
use crate::genome::{random_genome, Archive, Genome, Insertion};

#[derive(Debug, Clone, PartialEq)]
pub struct EliteEntry {
    pub genome: Genome,
    /// Generation-local fitness at the time the entry was added.
    pub fitness: f64,
    pub generation: usize,
}

/// Cross-generation elite archive of bounded size.
#[derive(Debug, Clone, PartialEq)]
pub struct ElitePool {
    capacity: usize,
    entries: Vec<EliteEntry>,
}

impl ElitePool {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            entries: Vec::new(),
        }
    }

    pub fn entries(&self) -> &[EliteEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds entries, then drops the lowest recorded fitness until the pool
    /// fits. Among equal fitnesses the most recently added entry goes first.
    pub fn extend(&mut self, entries: impl IntoIterator<Item = EliteEntry>) {
        self.entries.extend(entries);
        while self.entries.len() > self.capacity {
            let mut worst = 0;
            for (i, e) in self.entries.iter().enumerate() {
                if e.fitness <= self.entries[worst].fitness {
                    worst = i;
                }
            }
            self.entries.remove(worst);
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    MabEa,
    Bai,
    Neighborhood,
}

/// MAB-EA: bandit-allocated evaluation inside an elitist EA with a global
/// duplicate archive.
pub fn run_mab_ea<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_mode(cfg, Mode::MabEa)?;
    generational(cfg, env, rng, Variant::MabEa)
}

/// Best-arm identification mode.
///
/// Every generation is entirely new offspring. The best `C_e` percent of each
/// generation join an elite pool capped at `K_e`; after the last generation
/// successive rejects spends `T_e` fresh visits on the pool and its pick is
/// the winner.
///
/// The same best-arm phase is also run (on a separate random stream, so the
/// evolution is unaffected) after every earlier generation and stored in
/// [`GenerationSnapshot::recommended`], giving the winner one would get by
/// stopping there.
pub fn run_bai_mode<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_mode(cfg, Mode::Bai)?;
    generational(cfg, env, rng, Variant::Bai)
}

/// MAB-EA ranked by [`neighborhood_fitness`] over every evaluation so far.
pub fn run_neighborhood<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_mode(cfg, Mode::Neighborhood)?;
    generational(cfg, env, rng, Variant::Neighborhood)
}

fn best_arm_phase<E: Environment, R: Rng + ?Sized>(
    pool: &ElitePool,
    budget: u64,
    env: &E,
    rng: &mut R,
) -> Result<(Genome, f64)> {
    match pool.entries() {
        [] => Err(Error::PoolTooSmall(0)),
        [only] => Ok((only.genome.clone(), only.fitness)),
        entries => {
            let mut arms = vec![ArmState::new(); entries.len()];
            let mut source = |i: usize| env.visit(&entries[i].genome, rng);
            let out = sr_run(&mut arms, budget, &mut source)?;
            Ok((
                entries[out.recommended].genome.clone(),
                arms[out.recommended].empirical_mean(),
            ))
        }
    }
}

fn generational<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
    variant: Variant,
) -> Result<RunOutcome> {
    let space = env.space().clone();
    let k = cfg.population_size;
    let limit = rejection_limit(k);
    let mut streams = Streams::derive(rng);
    let mut archive = Archive::new();

    let mut initial = Vec::with_capacity(k);
    let mut padded = fill(
        k,
        limit,
        &mut streams.breed,
        |r| Ok(random_genome(&space, r)),
        |g| archive.check_insert(g) == Insertion::Fresh,
        &mut initial,
    )?;
    let mut population: Vec<Candidate> = initial.into_iter().map(|g| Candidate::new(g, 1)).collect();

    let mut history: Vec<(Genome, f64)> = Vec::new();
    let mut pool = ElitePool::new(cfg.bai_elite_size);
    let mut snapshots = Vec::with_capacity(cfg.generations);
    let mut bai = None;

    for generation in 1..=cfg.generations {
        for c in &mut population {
            c.arm = ArmState::new();
        }
        let mut shared = SharedState::default();
        let (visits, conversions) = evaluate(
            cfg.policy,
            &mut population,
            &mut shared,
            cfg.traffic_per_generation,
            env,
            &mut streams,
        )?;

        let fitness: Vec<f64> = if variant == Variant::Neighborhood {
            history.extend(population.iter().map(|c| (c.genome.clone(), c.fitness())));
            population
                .iter()
                .map(|c| neighborhood_fitness(&c.genome, &history, cfg.neighborhood_size))
                .collect::<Result<_>>()?
        } else {
            population.iter().map(Candidate::fitness).collect()
        };

        let order = rank_best_first(&fitness);
        let elites = &order[..cfg.elite_count()];
        let parents: Vec<(&Genome, f64)> = order[..cfg.parent_count()]
            .iter()
            .map(|&i| (&population[i].genome, fitness[i]))
            .collect();

        let mut recommended = None;
        if variant == Variant::Bai {
            pool.extend(elites.iter().map(|&i| EliteEntry {
                genome: population[i].genome.clone(),
                fitness: fitness[i],
                generation,
            }));
            if generation == cfg.generations && pool.len() < 2 {
                return Err(Error::PoolTooSmall(pool.len()));
            }
            let (winner, winner_fitness) =
                best_arm_phase(&pool, cfg.bai_traffic, env, &mut streams.probe)?;
            if generation == cfg.generations {
                bai = Some(BaiResult {
                    winner: winner.clone(),
                    winner_fitness,
                    pool: pool.entries().to_vec(),
                });
            }
            recommended = Some(winner);
        }

        let mut next: Vec<Candidate> = match variant {
            Variant::Bai => Vec::with_capacity(k),
            _ => elites
                .iter()
                .map(|&i| Candidate::new(population[i].genome.clone(), population[i].birth_generation))
                .collect(),
        };
        let mut offspring = Vec::with_capacity(k - next.len());
        padded |= fill(
            k - next.len(),
            limit,
            &mut streams.breed,
            |r| breed(&parents, &space, cfg.mutation_prob, r),
            |g| archive.check_insert(g) == Insertion::Fresh,
            &mut offspring,
        )?;
        next.extend(offspring.into_iter().map(|g| Candidate::new(g, generation + 1)));

        snapshots.push(GenerationSnapshot {
            generation,
            population: std::mem::replace(&mut population, next),
            fitness,
            visits,
            conversions,
            recommended,
        });
    }

    Ok(RunOutcome {
        generations: snapshots,
        next_population: population.into_iter().map(|c| c.genome).collect(),
        duplicate_padding: padded,
        bai,
    })
}
