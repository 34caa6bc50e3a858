use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{sr_run, ts_select, ucb1_select, update, ArmState, RewardSource, SharedState};
use crate::error::{Error, Result};

/// Traffic allocation policy for one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    /// Even round-robin split (the non-bandit baseline).
    Uniform,
    Ucb1,
    #[serde(rename = "ts")]
    Thompson,
    #[serde(rename = "sr")]
    SuccessiveRejects,
}

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::Uniform,
        Policy::Ucb1,
        Policy::Thompson,
        Policy::SuccessiveRejects,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Policy::Uniform => "uniform",
            Policy::Ucb1 => "ucb1",
            Policy::Thompson => "ts",
            Policy::SuccessiveRejects => "sr",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown policy {s:?}")))
    }
}

/// What a call to [`run_policy`] spent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation {
    /// Pulls charged, always equal to the budget.
    pub pulls: u64,
    /// Successive-rejects recommendation, if that policy ran.
    pub recommended: Option<usize>,
    /// Pulls successive rejects left unspent and that were handed round-robin
    /// to its final-phase arms.
    pub redistributed: u64,
}

/// Round-robin split: arm `i` gets `budget / K` pulls, plus one if
/// `i < budget % K`.
pub fn uniform_allocate<S: RewardSource + ?Sized>(
    arms: &mut [ArmState],
    budget: u64,
    source: &mut S,
) -> Result<()> {
    if arms.is_empty() {
        return if budget == 0 { Ok(()) } else { Err(Error::NoArms) };
    }
    let k = arms.len() as u64;
    for r in 0..budget {
        let i = (r % k) as usize;
        arms[i].record(source.pull(i));
    }
    Ok(())
}

/// Spends exactly `budget` pulls on `arms` under `policy`.
///
/// Arms are taken as they are: zeroed arms give the classical policy,
/// carried arms (and a carried `shared` counter) give the asynchronous one.
pub fn run_policy<S, R>(
    policy: Policy,
    arms: &mut [ArmState],
    shared: &mut SharedState,
    budget: u64,
    source: &mut S,
    rng: &mut R,
) -> Result<Allocation>
where
    S: RewardSource + ?Sized,
    R: Rng + ?Sized,
{
    let mut allocation = Allocation {
        pulls: budget,
        ..Allocation::default()
    };
    match policy {
        Policy::Uniform => {
            uniform_allocate(arms, budget, source)?;
            shared.total_pulls += budget;
        }
        Policy::Ucb1 => {
            for _ in 0..budget {
                let i = ucb1_select(arms, shared)?;
                let reward = source.pull(i);
                update(&mut arms[i], shared, reward);
            }
        }
        Policy::Thompson => {
            for _ in 0..budget {
                let i = ts_select(arms, rng)?;
                let reward = source.pull(i);
                update(&mut arms[i], shared, reward);
            }
        }
        Policy::SuccessiveRejects => {
            let out = sr_run(arms, budget, source)?;
            let leftover = budget - out.pulls_used;
            for r in 0..leftover {
                let i = out.final_phase[(r % out.final_phase.len() as u64) as usize];
                arms[i].record(source.pull(i));
            }
            shared.total_pulls += budget;
            allocation.recommended = Some(out.recommended);
            allocation.redistributed = leftover;
        }
    }
    Ok(allocation)
}
