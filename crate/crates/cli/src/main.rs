use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use mabea::genome::SearchSpace;
use mabea::harness::{compare, read_records_file, run_experiment, write_records, ExperimentConfig};
use mabea::simulator::EffectTable;

#[derive(Parser)]
#[command(name = "mabea", version, about = "Bandit-driven evolutionary web design optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write per-generation records as CSV.
    Run {
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Enumerate every design of an effect table.
    Enumerate { table: PathBuf },
    /// Generate a random effect table.
    GenTable {
        /// Choice counts per element, e.g. 5,4,2,3,4,3,3,4 (the default).
        #[arg(long, value_delimiter = ',')]
        space: Option<Vec<u32>>,
        #[arg(long, default_value_t = 0.05)]
        base: f64,
        #[arg(long, default_value_t = -0.01, allow_negative_numbers = true)]
        lo: f64,
        #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
        hi: f64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Welch-test two records files per generation and metric (A against B).
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { config, out } => {
            let cfg = ExperimentConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            let tables = cfg.tables()?;
            let records = run_experiment(&cfg.evolution, &tables, cfg.replications, cfg.master_seed)?;
            let mut w = output(out.as_deref())?;
            write_records(&mut w, &records)?;
            w.flush()?;
        }
        Command::Enumerate { table } => {
            let t = EffectTable::load(&table).with_context(|| format!("loading {}", table.display()))?;
            let s = t.enumerate()?;
            println!("designs: {}", s.design_count);
            println!("mean_rate: {}", s.mean_rate);
            println!("best_rate: {}", s.best_rate);
            println!("best_design: {}", s.best_genome);
        }
        Command::GenTable { space, base, lo, hi, seed, out } => {
            let space = match space {
                Some(counts) => SearchSpace::new(counts)?,
                None => SearchSpace::landing_page(),
            };
            EffectTable::generate(space, base, (lo, hi), seed)?
                .save(&out)
                .with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Compare { a, b, out } => {
            let ra = read_records_file(&a).with_context(|| format!("reading {}", a.display()))?;
            let rb = read_records_file(&b).with_context(|| format!("reading {}", b.display()))?;
            let mut w = output(out.as_deref())?;
            compare(&ra, &rb)?.write_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            // Parser errors can span lines; the diagnostic must not.
            let msg = format!("{e:#}");
            eprintln!("error: {}", msg.split_whitespace().collect::<Vec<_>>().join(" "));
            ExitCode::FAILURE
        }
    }
}
