//! Bandit-allocated evolutionary search for conversion-rate optimization.
//!
//! Candidate web designs are categorical genomes. Each generation a
//! multi-armed bandit policy splits a fixed visitor budget across the
//! population, the measured conversion rates become fitnesses, and an
//! evolutionary loop breeds the next population. Three drivers are provided:
//!
//! - [`evolution::run_mab_ea`]: bandit allocation inside a plain elitist EA.
//! - [`evolution::run_bai_mode`]: no elite survival, a cross-generation elite
//!   pool, and a final fixed-budget best-arm identification phase.
//! - [`evolution::run_campaign`]: survivors keep their conversion statistics
//!   across generations to maximize conversions during the run.
//!
//! The [`simulator`] module supplies an additive synthetic traffic model and
//! the [`harness`] module runs seeded replications, computes metrics and
//! compares algorithms with Welch t-tests.

pub mod bandit;
pub mod error;
pub mod evolution;
pub mod genome;
pub mod harness;
pub mod rng;
pub mod simulator;

pub use error::{Error, Result};
