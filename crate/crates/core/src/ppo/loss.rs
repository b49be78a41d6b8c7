use crate::error::{Error, Result};

/// Scalar loss and its parts for one minibatch.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossTerms {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
}

/// Per-sample derivatives of [`LossTerms::total`].
#[derive(Debug, Clone, PartialEq)]
pub struct LossGrads {
    pub d_logp: Vec<f64>,
    pub d_entropy: Vec<f64>,
    pub d_value: Vec<f64>,
}

/// `(A − mean) / (std + 1e-8)` with the unbiased standard deviation.
pub fn normalize_advantages(adv: &[f64]) -> Vec<f64> {
    let n = adv.len() as f64;
    let mean = adv.iter().sum::<f64>() / n;
    let var = if adv.len() > 1 {
        adv.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std = var.sqrt();
    adv.iter().map(|a| (a - mean) / (std + 1e-8)).collect()
}

/// Clipped PPO objective over one minibatch.
///
/// `advantages` must already be normalised. The value term uses the clipped form
/// `0.5·mean(max((v − R)², (v_clip − R)²))`, and the combined loss is
/// `policy + value_coef·value − entropy_coef·entropy`.
#[allow(clippy::too_many_arguments)]
pub fn ppo_loss(
    old_logp: &[f64],
    advantages: &[f64],
    returns: &[f64],
    old_values: &[f64],
    new_logp: &[f64],
    entropy: &[f64],
    new_values: &[f64],
    clip: f64,
    value_coef: f64,
    entropy_coef: f64,
) -> Result<(LossTerms, LossGrads)> {
    let n = old_logp.len();
    let inv = 1.0 / n as f64;
    let mut terms = LossTerms::default();
    let mut grads = LossGrads {
        d_logp: vec![0.0; n],
        d_entropy: vec![-entropy_coef * inv; n],
        d_value: vec![0.0; n],
    };
    for i in 0..n {
        let (pg, d_pg) = surrogate(old_logp[i], advantages[i], new_logp[i], clip);
        terms.policy += pg * inv;
        grads.d_logp[i] = d_pg * inv;
        let (vl, d_vl) = clipped_value(new_values[i], old_values[i], returns[i], clip);
        terms.value += vl * inv;
        grads.d_value[i] = value_coef * d_vl * inv;
        terms.entropy += entropy[i] * inv;
    }
    terms.total = terms.policy + value_coef * terms.value - entropy_coef * terms.entropy;
    if !terms.total.is_finite() {
        return Err(Error::Numeric(format!("non-finite loss {terms:?}")));
    }
    Ok((terms, grads))
}

/// Per-sample clipped surrogate `max(−A·r, −A·clip(r))` and its derivative in the new log-probability.
pub(crate) fn surrogate(old_logp: f64, advantage: f64, new_logp: f64, clip: f64) -> (f64, f64) {
    let ratio = (new_logp - old_logp).exp();
    let unclipped = -advantage * ratio;
    let clipped = -advantage * ratio.clamp(1.0 - clip, 1.0 + clip);
    if unclipped >= clipped {
        (unclipped, unclipped)
    } else {
        (clipped, 0.0)
    }
}

/// Per-sample `0.5·max((v − R)², (v_clip − R)²)` and its derivative in `v`.
pub(crate) fn clipped_value(v: f64, old_v: f64, ret: f64, clip: f64) -> (f64, f64) {
    let diff = v - old_v;
    let v_clip = old_v + diff.clamp(-clip, clip);
    let (sq, sq_clip) = ((v - ret).powi(2), (v_clip - ret).powi(2));
    let d = if sq >= sq_clip {
        v - ret
    } else if diff.abs() < clip {
        v_clip - ret
    } else {
        0.0
    };
    (0.5 * sq.max(sq_clip), d)
}
