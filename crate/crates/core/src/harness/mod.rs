//! Seeded multi-replication experiments, metrics and significance tests.

mod compare;
mod config;
mod experiment;
mod stats;

pub use compare::{compare, ComparisonReport, ComparisonRow, Metric, SIGNIFICANCE_LEVEL};
pub use config::{ExperimentConfig, TableGeneration, TableSource};
pub use experiment::{
    best_true_cr, read_records, read_records_file, records_for_run, run_experiment,
    run_experiment_with, write_records, write_records_file, Execution, GenerationRecord,
};
pub use stats::{summarize, welch_t_test, Summary, WelchTest};
