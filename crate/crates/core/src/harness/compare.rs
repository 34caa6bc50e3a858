use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::experiment::GenerationRecord;
use super::stats::{summarize, welch_from_summaries, Summary, WelchTest};
use crate::error::{Error, Result};

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    BestTrueCr,
    OverallCr,
    CumulativeCr,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::BestTrueCr, Metric::OverallCr, Metric::CumulativeCr];

    pub fn of(self, r: &GenerationRecord) -> f64 {
        match self {
            Metric::BestTrueCr => r.best_true_cr,
            Metric::OverallCr => r.overall_cr,
            Metric::CumulativeCr => r.cumulative_cr,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::BestTrueCr => "best_true_cr",
            Metric::OverallCr => "overall_cr",
            Metric::CumulativeCr => "cumulative_cr",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub metric: Metric,
    pub generation: u64,
    pub mean_a: f64,
    pub se_a: f64,
    pub mean_b: f64,
    pub se_b: f64,
    pub t: f64,
    pub p: f64,
    pub significant: bool,
}

impl ComparisonRow {
    /// A is significantly larger than B.
    pub fn a_wins(&self) -> bool {
        self.significant && self.mean_a > self.mean_b
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComparisonReport {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn row(&self, metric: Metric, generation: u64) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.generation == generation)
    }

    pub fn metric(&self, metric: Metric) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(move |r| r.metric == metric)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for r in &self.rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let rows = csv::Reader::from_reader(reader)
            .deserialize()
            .collect::<std::result::Result<_, _>>()?;
        Ok(Self { rows })
    }
}

fn by_generation(records: &[GenerationRecord]) -> BTreeMap<u64, Vec<&GenerationRecord>> {
    let mut map: BTreeMap<u64, Vec<&GenerationRecord>> = BTreeMap::new();
    for r in records {
        map.entry(r.generation).or_default().push(r);
    }
    map
}

/// Zero-variance pairs are not an error here: equal constants compare as
/// `t = 0, p = 1`, different constants as infinitely significant.
fn test_or_constant(a: &Summary, b: &Summary) -> Result<WelchTest> {
    if a.variance == 0.0 && b.variance == 0.0 {
        return Ok(if a.mean == b.mean {
            WelchTest { t: 0.0, df: f64::NAN, p: 1.0 }
        } else {
            WelchTest {
                t: if a.mean > b.mean { f64::INFINITY } else { f64::NEG_INFINITY },
                df: f64::NAN,
                p: 0.0,
            }
        });
    }
    welch_from_summaries(a, b)
}

/// Per generation and metric, Welch-tests experiment A against B across
/// replications.
pub fn compare(a: &[GenerationRecord], b: &[GenerationRecord]) -> Result<ComparisonReport> {
    let (ga, gb) = (by_generation(a), by_generation(b));
    if ga.keys().ne(gb.keys()) {
        return Err(Error::ShapeMismatch(format!(
            "experiments cover generations {:?} and {:?}",
            ga.keys().collect::<Vec<_>>(),
            gb.keys().collect::<Vec<_>>()
        )));
    }
    if ga.is_empty() {
        return Err(Error::ShapeMismatch("no records to compare".into()));
    }
    let mut rows = Vec::new();
    for metric in Metric::ALL {
        for (&generation, ra) in &ga {
            let rb = &gb[&generation];
            let va: Vec<f64> = ra.iter().map(|r| metric.of(r)).collect();
            let vb: Vec<f64> = rb.iter().map(|r| metric.of(r)).collect();
            if va.len() < 2 || vb.len() < 2 {
                return Err(Error::DegenerateSamples(format!(
                    "generation {generation} has {} and {} replications",
                    va.len(),
                    vb.len()
                )));
            }
            let (sa, sb) = (summarize(&va), summarize(&vb));
            let test = test_or_constant(&sa, &sb)?;
            rows.push(ComparisonRow {
                metric,
                generation,
                mean_a: sa.mean,
                se_a: sa.std_err(),
                mean_b: sb.mean,
                se_b: sb.std_err(),
                t: test.t,
                p: test.p,
                significant: test.p < SIGNIFICANCE_LEVEL,
            });
        }
    }
    Ok(ComparisonReport { rows })
}
