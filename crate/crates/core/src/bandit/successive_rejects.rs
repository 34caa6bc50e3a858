use super::{ArmState, RewardSource};
use crate::error::{Error, Result};

/// Result of one successive-rejects run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SrOutcome {
    /// The single surviving arm.
    pub recommended: usize,
    /// Pulls actually spent; never more than the budget.
    pub pulls_used: u64,
    /// Arms still competing in the last phase, in index order.
    pub final_phase: Vec<usize>,
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `1/2 + sum_{i=2..K} 1/i` as an exact fraction, if it fits in u128.
fn log_bar_fraction(arms: usize) -> Option<(u128, u128)> {
    let mut den: u128 = 2;
    for i in 2..=arms as u128 {
        den = den.checked_mul(i / gcd(den, i))?;
    }
    let mut num = den / 2;
    for i in 2..=arms as u128 {
        num = num.checked_add(den / i)?;
    }
    Some((num, den))
}

fn log_bar(arms: usize) -> f64 {
    0.5 + (2..=arms).map(|i| 1.0 / i as f64).sum::<f64>()
}

/// Cumulative per-arm pull targets `n_1 <= ... <= n_{K-1}`.
///
/// `n_k = ceil((n - K) / (logbar(K) * (K + 1 - k)))`, computed in exact
/// rational arithmetic whenever the denominators fit in 128 bits.
pub fn sr_schedule(arms: usize, budget: u64) -> Result<Vec<u64>> {
    if arms < 2 || budget < arms as u64 {
        return Err(Error::InfeasibleSchedule { arms, budget });
    }
    let spare = budget - arms as u64;
    let exact = log_bar_fraction(arms);
    let lb = log_bar(arms);
    let targets = (1..arms)
        .map(|k| {
            let width = (arms + 1 - k) as u128;
            exact
                .and_then(|(num, den)| {
                    // spare / ((num / den) * width) = spare * den / (num * width)
                    let top = (spare as u128).checked_mul(den)?;
                    let bottom = num.checked_mul(width)?;
                    Some(top.div_ceil(bottom) as u64)
                })
                .unwrap_or_else(|| (spare as f64 / (lb * width as f64)).ceil() as u64)
        })
        .collect();
    Ok(targets)
}

/// Successive Rejects over `arms` with a total budget of `budget` pulls.
///
/// Arms may arrive with counts from earlier runs; rejections use whatever
/// the arms hold, so carried statistics take part in every decision. The
/// arm with the lowest empirical mean is dropped after each phase, the
/// highest index going first on ties.
pub fn sr_run<S: RewardSource + ?Sized>(
    arms: &mut [ArmState],
    budget: u64,
    source: &mut S,
) -> Result<SrOutcome> {
    let schedule = sr_schedule(arms.len(), budget)?;
    let mut active: Vec<usize> = (0..arms.len()).collect();
    let mut final_phase = Vec::new();
    let mut previous = 0;
    let mut used = 0;

    for (phase, &target) in schedule.iter().enumerate() {
        let pulls = target - previous;
        for &i in &active {
            for _ in 0..pulls {
                arms[i].record(source.pull(i));
            }
        }
        used += pulls * active.len() as u64;
        previous = target;

        if phase + 1 == schedule.len() {
            final_phase = active.clone();
        }
        let mut worst = 0;
        for (pos, &i) in active.iter().enumerate() {
            if arms[i].empirical_mean() <= arms[active[worst]].empirical_mean() {
                worst = pos;
            }
        }
        active.remove(worst);
    }

    debug_assert_eq!(active.len(), 1);
    Ok(SrOutcome {
        recommended: active[0],
        pulls_used: used,
        final_phase,
    })
}
