use std::collections::HashSet;

use rand::Rng;

use super::{
    breed, check_mode, evaluate, fill, rank_best_first, rejection_limit, Candidate, Environment,
    EvolutionConfig, GenerationSnapshot, Mode, RunOutcome, Streams,
};
use crate::bandit::{ArmState, SharedState};
use crate::error::Result;
use crate::genome::{random_genome, Genome};

/// Campaign mode.
///
/// Each generation the worst `C_p` percent are replaced by offspring of the
/// best `C_p` percent; everyone else survives. With `cfg.asynchronous` the
/// survivors keep their conversion counts (and UCB1 keeps its round counter)
/// from one generation to the next; otherwise all statistics restart at zero.
/// Duplicates are only forbidden within the current population.
pub fn run_campaign<E: Environment, R: Rng + ?Sized>(
    cfg: &EvolutionConfig,
    env: &E,
    rng: &mut R,
) -> Result<RunOutcome> {
    check_mode(cfg, Mode::Campaign)?;
    let space = env.space().clone();
    let k = cfg.population_size;
    let limit = rejection_limit(k);
    let mut streams = Streams::derive(rng);

    let mut initial = Vec::with_capacity(k);
    let mut seen = HashSet::new();
    let mut padded = fill(
        k,
        limit,
        &mut streams.breed,
        |r| Ok(random_genome(&space, r)),
        |g| seen.insert(g.clone()),
        &mut initial,
    )?;
    let mut population: Vec<Candidate> = initial.into_iter().map(|g| Candidate::new(g, 1)).collect();
    let mut shared = SharedState::default();
    let mut snapshots = Vec::with_capacity(cfg.generations);
    let replaced = cfg.parent_count();

    for generation in 1..=cfg.generations {
        if !cfg.asynchronous {
            for c in &mut population {
                c.arm = ArmState::new();
            }
            shared = SharedState::default();
        }
        let (visits, conversions) = evaluate(
            cfg.policy,
            &mut population,
            &mut shared,
            cfg.traffic_per_generation,
            env,
            &mut streams,
        )?;
        let fitness: Vec<f64> = population.iter().map(Candidate::fitness).collect();

        let parents: Vec<(&Genome, f64)> = rank_best_first(&fitness)[..replaced]
            .iter()
            .map(|&i| (&population[i].genome, fitness[i]))
            .collect();

        // Worst first; younger candidates go before older ones on ties.
        let mut removal: Vec<usize> = (0..k).collect();
        removal.sort_by(|&a, &b| {
            fitness[a]
                .total_cmp(&fitness[b])
                .then(population[b].birth_generation.cmp(&population[a].birth_generation))
                .then(b.cmp(&a))
        });
        let removed: HashSet<usize> = removal[..replaced].iter().copied().collect();

        let mut next: Vec<Candidate> = (0..k)
            .filter(|i| !removed.contains(i))
            .map(|i| population[i].clone())
            .collect();
        let mut present: HashSet<Genome> = next.iter().map(|c| c.genome.clone()).collect();
        let mut offspring = Vec::with_capacity(replaced);
        padded |= fill(
            replaced,
            limit,
            &mut streams.breed,
            |r| breed(&parents, &space, cfg.mutation_prob, r),
            |g| present.insert(g.clone()),
            &mut offspring,
        )?;
        next.extend(offspring.into_iter().map(|g| Candidate::new(g, generation + 1)));

        snapshots.push(GenerationSnapshot {
            generation,
            population: std::mem::replace(&mut population, next),
            fitness,
            visits,
            conversions,
            recommended: None,
        });
    }

    Ok(RunOutcome {
        generations: snapshots,
        next_population: population.into_iter().map(|c| c.genome).collect(),
        duplicate_padding: padded,
        bai: None,
    })
}
