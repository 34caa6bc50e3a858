use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance (n - 1 denominator); 0 for a single value.
    pub variance: f64,
}

impl Summary {
    pub fn std_err(&self) -> f64 {
        (self.variance / self.n as f64).sqrt()
    }
}

pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let variance = if n > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    } else {
        0.0
    };
    Summary { n, mean, variance }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WelchTest {
    pub t: f64,
    /// Welch-Satterthwaite degrees of freedom.
    pub df: f64,
    /// Two-sided.
    pub p: f64,
}

/// Welch's unequal-variance t-test of `a` against `b`.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<WelchTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::DegenerateSamples(format!(
            "need at least 2 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (sa, sb) = (summarize(a), summarize(b));
    welch_from_summaries(&sa, &sb)
}

pub(crate) fn welch_from_summaries(a: &Summary, b: &Summary) -> Result<WelchTest> {
    let va = a.variance / a.n as f64;
    let vb = b.variance / b.n as f64;
    let se2 = va + vb;
    if !(se2 > 0.0 && se2.is_finite()) {
        return Err(Error::DegenerateSamples("both samples have zero variance".into()));
    }
    let t = (a.mean - b.mean) / se2.sqrt();
    let df = se2 * se2 / (va * va / (a.n - 1) as f64 + vb * vb / (b.n - 1) as f64);
    let dist = StudentsT::new(0.0, 1.0, df)
        .map_err(|e| Error::DegenerateSamples(format!("t distribution with {df} dof: {e}")))?;
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(WelchTest { t, df, p })
}
