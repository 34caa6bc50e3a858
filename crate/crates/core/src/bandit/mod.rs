//! Bernoulli multi-armed bandit policies.
//!
//! Every policy works over a slice of [`ArmState`] that the caller owns.
//! Zeroed arms give the classical (synchronous) behaviour; arms that carry
//! counts from an earlier run give the asynchronous variant, with no change
//! to the policy code.

mod policy;
mod successive_rejects;
mod thompson;
mod ucb1;

pub use policy::{run_policy, uniform_allocate, Allocation, Policy};
pub use successive_rejects::{sr_run, sr_schedule, SrOutcome};
pub use thompson::{posterior_draw, ts_select};
pub use ucb1::{ucb1_index, ucb1_select};

use serde::{Deserialize, Serialize};

/// Conversion counters for one arm.
///
/// `pulls == successes + failures` holds by construction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmState {
    successes: u64,
    failures: u64,
}

impl ArmState {
    pub const fn new() -> Self {
        Self {
            successes: 0,
            failures: 0,
        }
    }

    pub const fn from_counts(successes: u64, failures: u64) -> Self {
        Self {
            successes,
            failures,
        }
    }

    pub const fn successes(&self) -> u64 {
        self.successes
    }

    pub const fn failures(&self) -> u64 {
        self.failures
    }

    pub const fn pulls(&self) -> u64 {
        self.successes + self.failures
    }

    /// `successes / pulls`, or 0 for an arm that was never pulled.
    pub fn empirical_mean(&self) -> f64 {
        match self.pulls() {
            0 => 0.0,
            n => self.successes as f64 / n as f64,
        }
    }

    pub fn record(&mut self, reward: bool) {
        if reward {
            self.successes += 1;
        } else {
            self.failures += 1;
        }
    }
}

/// State shared by all arms of one policy instance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SharedState {
    /// Round counter `t`; only UCB1 reads it.
    pub total_pulls: u64,
}

/// Something that answers pulls with Bernoulli rewards.
pub trait RewardSource {
    fn pull(&mut self, arm: usize) -> bool;
}

impl<F> RewardSource for F
where
    F: FnMut(usize) -> bool,
{
    fn pull(&mut self, arm: usize) -> bool {
        self(arm)
    }
}

/// Applies one observed reward to an arm and the shared round counter.
pub fn update(arm: &mut ArmState, shared: &mut SharedState, reward: bool) {
    arm.record(reward);
    shared.total_pulls += 1;
}

/// Index of the largest score, lowest index on ties.
pub(crate) fn argmax(scores: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.into_iter().enumerate() {
        match best {
            Some((_, b)) if s <= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn update_from_empty_success() {
        let mut arm = ArmState::new();
        let mut shared = SharedState::default();
        update(&mut arm, &mut shared, true);
        assert_eq!((arm.successes(), arm.failures(), arm.pulls()), (1, 0, 1));
        assert_eq!(arm.empirical_mean(), 1.0);
        assert_eq!(shared.total_pulls, 1);
    }

    #[test]
    fn update_failure() {
        let mut arm = ArmState::from_counts(1, 1);
        let mut shared = SharedState::default();
        update(&mut arm, &mut shared, false);
        assert_eq!((arm.successes(), arm.failures(), arm.pulls()), (1, 2, 3));
        assert!((arm.empirical_mean() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn running_mean_matches_arithmetic_mean() {
        let mut arm = ArmState::new();
        let mut shared = SharedState::default();
        for r in [true, false, true, true] {
            update(&mut arm, &mut shared, r);
        }
        assert_eq!(arm.empirical_mean(), 0.75);
        assert_eq!(shared.total_pulls, 4);
    }

    #[test]
    fn unpulled_arm_has_zero_mean() {
        assert_eq!(ArmState::new().empirical_mean(), 0.0);
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax([1.0, 3.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax([0.5, 0.5]), Some(0));
        assert_eq!(argmax(std::iter::empty()), None);
    }
}
