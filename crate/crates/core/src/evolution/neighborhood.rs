use crate::error::{Error, Result};
use crate::genome::Genome;

/// Mean recorded fitness of the `k` evaluated designs closest to `candidate`
/// in Hamming distance. Equal distances go to the earlier evaluation; the
/// candidate's own past evaluations count.
pub fn neighborhood_fitness(candidate: &Genome, evaluated: &[(Genome, f64)], k: usize) -> Result<f64> {
    if evaluated.is_empty() || k == 0 {
        return Err(Error::InvalidConfig(
            "neighborhood needs at least one evaluated design and k >= 1".into(),
        ));
    }
    let mut by_distance: Vec<(usize, f64)> = evaluated
        .iter()
        .map(|(g, f)| (candidate.hamming(g), *f))
        .collect();
    by_distance.sort_by_key(|&(d, _)| d);
    let nearest = &by_distance[..k.min(by_distance.len())];
    Ok(nearest.iter().map(|&(_, f)| f).sum::<f64>() / nearest.len() as f64)
}
