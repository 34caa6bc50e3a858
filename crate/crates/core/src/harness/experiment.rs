use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{run, EvolutionConfig, GenerationSnapshot, RunOutcome};
use crate::rng::{derive_seed, seeded};
use crate::simulator::EffectTable;

/// One row of the records CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub run_id: u64,
    pub generation: u64,
    /// True rate of the generation's winner: the highest measured fitness,
    /// or in `bai` mode the best-arm pick from the elite pool.
    pub best_true_cr: f64,
    /// Conversions / visits within this generation.
    pub overall_cr: f64,
    /// Conversions / visits over generations 1..=g.
    pub cumulative_cr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

/// True rate of the candidate with the highest measured fitness.
pub fn best_true_cr(snapshot: &GenerationSnapshot, table: &EffectTable) -> Result<f64> {
    table.true_rate(&snapshot.population[snapshot.best_index()].genome)
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Converts one run into its per-generation records.
pub fn records_for_run(run_id: u64, outcome: &RunOutcome, table: &EffectTable) -> Result<Vec<GenerationRecord>> {
    let (mut visits, mut conversions) = (0, 0);
    outcome
        .generations
        .iter()
        .map(|s| {
            visits += s.visits;
            conversions += s.conversions;
            Ok(GenerationRecord {
                run_id,
                generation: s.generation as u64,
                best_true_cr: table.true_rate(s.winner())?,
                overall_cr: ratio(s.conversions, s.visits),
                cumulative_cr: ratio(conversions, visits),
            })
        })
        .collect()
}

/// [`run_experiment_with`] using parallel execution.
pub fn run_experiment(
    cfg: &EvolutionConfig,
    tables: &[EffectTable],
    replications: u64,
    master_seed: u64,
) -> Result<Vec<GenerationRecord>> {
    run_experiment_with(cfg, tables, replications, master_seed, Execution::Parallel)
}

/// Runs `replications` independent runs. Replication `r` uses
/// `tables[r % tables.len()]` and the seed `derive_seed(master_seed, r)`;
/// records come back in replication order regardless of scheduling.
pub fn run_experiment_with(
    cfg: &EvolutionConfig,
    tables: &[EffectTable],
    replications: u64,
    master_seed: u64,
    execution: Execution,
) -> Result<Vec<GenerationRecord>> {
    cfg.validate()?;
    if tables.is_empty() {
        return Err(Error::InvalidConfig("no effect table given".into()));
    }
    if replications == 0 {
        return Err(Error::InvalidConfig("at least one replication is required".into()));
    }
    let replicate = |r: u64| -> Result<Vec<GenerationRecord>> {
        let table = &tables[(r % tables.len() as u64) as usize];
        let mut rng = seeded(derive_seed(master_seed, r));
        let outcome = run(cfg, table, &mut rng)?;
        records_for_run(r, &outcome, table)
    };
    let per_run: Vec<Vec<GenerationRecord>> = match execution {
        Execution::Serial => (0..replications).map(replicate).collect::<Result<_>>()?,
        Execution::Parallel => (0..replications)
            .into_par_iter()
            .map(replicate)
            .collect::<Result<_>>()?,
    };
    Ok(per_run.into_iter().flatten().collect())
}

pub fn write_records<W: Write>(writer: W, records: &[GenerationRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<GenerationRecord>> {
    csv::Reader::from_reader(reader)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_records_file(path: impl AsRef<Path>, records: &[GenerationRecord]) -> Result<()> {
    write_records(File::create(path)?, records)
}

pub fn read_records_file(path: impl AsRef<Path>) -> Result<Vec<GenerationRecord>> {
    read_records(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::Policy;
    use crate::evolution::Mode;
    use crate::genome::SearchSpace;

    fn small_cfg() -> EvolutionConfig {
        EvolutionConfig {
            population_size: 6,
            generations: 3,
            traffic_per_generation: 600,
            elite_percent: 34.0,
            parent_percent: 34.0,
            policy: Policy::Uniform,
            mode: Mode::MabEa,
            ..Default::default()
        }
    }

    fn table() -> EffectTable {
        EffectTable::generate(SearchSpace::landing_page(), 0.05, (-0.01, 0.01), 3).unwrap()
    }

    #[test]
    fn record_count_and_csv_header() {
        let recs = run_experiment(&small_cfg(), &[table()], 4, 9).unwrap();
        assert_eq!(recs.len(), 12);
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("run_id,generation,best_true_cr,overall_cr,cumulative_cr\n"));
        assert_eq!(read_records(text.as_bytes()).unwrap(), recs);
    }

    #[test]
    fn identity_table_reports_base_rate() {
        let t = EffectTable::identity(SearchSpace::landing_page(), 0.05).unwrap();
        let recs = run_experiment(&small_cfg(), &[t], 2, 1).unwrap();
        assert!(recs.iter().all(|r| r.best_true_cr == 0.05));
    }

    #[test]
    fn measured_winner_reports_its_true_rate() {
        use crate::evolution::Candidate;
        use crate::genome::Genome;
        let space = SearchSpace::new(vec![2]).unwrap();
        let t = EffectTable::new(space.clone(), 0.05, vec![vec![-0.01, 0.04]], None).unwrap();
        let snapshot = GenerationSnapshot {
            generation: 1,
            population: vec![
                Candidate::new(Genome::new(&space, vec![0]).unwrap(), 1),
                Candidate::new(Genome::new(&space, vec![1]).unwrap(), 1),
            ],
            fitness: vec![0.07, 0.02],
            visits: 0,
            conversions: 0,
            recommended: None,
        };
        assert!((best_true_cr(&snapshot, &t).unwrap() - 0.04).abs() < 1e-15);
    }

    #[test]
    fn rejects_empty_inputs() {
        assert!(run_experiment(&small_cfg(), &[], 1, 0).is_err());
        assert!(run_experiment(&small_cfg(), &[table()], 0, 0).is_err());
    }
}
