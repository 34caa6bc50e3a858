use rand::Rng;
use rand_distr::{Beta, Distribution};

use super::{argmax, ArmState};
use crate::error::{Error, Result};

/// Draws `theta ~ Beta(S + 1, F + 1)` for one arm.
pub fn posterior_draw<R: Rng + ?Sized>(arm: &ArmState, rng: &mut R) -> f64 {
    let alpha = arm.successes() as f64 + 1.0;
    let beta = arm.failures() as f64 + 1.0;
    // Both shapes are >= 1, so construction cannot fail.
    Beta::new(alpha, beta)
        .expect("beta shapes are positive and finite")
        .sample(rng)
}

/// Thompson sampling selection: one posterior draw per arm, largest wins.
pub fn ts_select<R: Rng + ?Sized>(arms: &[ArmState], rng: &mut R) -> Result<usize> {
    if arms.is_empty() {
        return Err(Error::NoArms);
    }
    argmax(arms.iter().map(|a| posterior_draw(a, rng))).ok_or(Error::NoArms)
}
