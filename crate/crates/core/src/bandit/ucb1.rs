use super::{argmax, ArmState, SharedState};
use crate::error::{Error, Result};

/// Upper confidence bound `mean + sqrt(2 ln t / n)` with the natural log.
pub fn ucb1_index(arm: &ArmState, total_pulls: u64) -> f64 {
    let t = total_pulls as f64;
    let n = arm.pulls() as f64;
    arm.empirical_mean() + (2.0 * t.ln() / n).sqrt()
}

/// Picks the next arm to pull under UCB1.
///
/// Unpulled arms are initialized first, lowest index first. After that the
/// arm with the largest [`ucb1_index`] wins, ties going to the lower index.
pub fn ucb1_select(arms: &[ArmState], shared: &SharedState) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::NoArms);
    }
    if let Some(i) = arms.iter().position(|a| a.pulls() == 0) {
        return Ok(i);
    }
    argmax(arms.iter().map(|a| ucb1_index(a, shared.total_pulls))).ok_or(Error::NoArms)
}
