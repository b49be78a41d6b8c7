use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;

/// Smallest probability whose logarithm is taken; below it log-probabilities are clamped.
pub const LOG_PROB_FLOOR: f64 = 1e-12;

/// `-Σ p log p` with `0·log 0 = 0`.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|p| p * p.ln()).sum::<f64>()
}

/// Draws an action from a categorical distribution; returns `(action, log p, entropy)`.
pub fn sample_action<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> (usize, f64, f64) {
    let action = match WeightedIndex::new(probs) {
        Ok(dist) => dist.sample(rng),
        // Only reachable with non-finite or all-zero weights; fall back to uniform.
        Err(_) => rng.random_range(0..probs.len()),
    };
    (action, probs[action].max(LOG_PROB_FLOOR).ln(), entropy(probs))
}
