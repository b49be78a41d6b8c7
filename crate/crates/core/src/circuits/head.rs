//! Policy heads turning Pauli-Z expectations into action probabilities.

/// Shift-and-normalise head: `p_i = (C_i + 1) / Σ_j (C_j + 1)`.
///
/// All expectations at -1 would divide by zero; the uniform distribution is returned there.
pub fn probs_plain(expvals: &[f64]) -> Vec<f64> {
    let shifted: Vec<f64> = expvals.iter().map(|c| (c + 1.0).max(0.0)).collect();
    let total: f64 = shifted.iter().sum();
    if total <= 0.0 {
        return vec![1.0 / expvals.len() as f64; expvals.len()];
    }
    shifted.into_iter().map(|v| v / total).collect()
}

/// Parametrised softmax head: `softmax(β ⊙ C)`.
///
/// `beta` has length 1 (one shared factor) or one entry per action.
pub fn probs_softmax(expvals: &[f64], beta: &[f64]) -> Vec<f64> {
    let logits: Vec<f64> = expvals.iter().enumerate().map(|(i, c)| beta_for(beta, i) * c).collect();
    softmax(&logits)
}

pub(crate) fn beta_for(beta: &[f64], i: usize) -> f64 {
    if beta.len() == 1 {
        beta[0]
    } else {
        beta[i]
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}
