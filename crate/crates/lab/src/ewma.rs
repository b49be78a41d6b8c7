use crate::error::{LabError, Result};

/// Smoothing for Frozen Lake learning curves.
pub const ALPHA_FROZEN_LAKE: f64 = 0.3;
/// Smoothing for Cart Pole learning curves.
pub const ALPHA_CART_POLE: f64 = 0.015;
/// Smoothing for hyperparameter sweeps.
pub const ALPHA_SWEEP: f64 = 0.05;

/// Exponentially weighted moving average: `y_0 = x_0`, `y_t = α·x_t + (1 − α)·y_{t−1}`.
pub fn ewma(series: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(LabError::Config(format!("smoothing factor {alpha} is outside (0, 1]")));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut prev: Option<f64> = None;
    for &x in series {
        let y = match prev {
            None => x,
            Some(p) => alpha * x + (1.0 - alpha) * p,
        };
        out.push(y);
        prev = Some(y);
    }
    Ok(out)
}

pub fn default_alpha(env: qppo_core::envs::EnvKind) -> f64 {
    match env {
        qppo_core::envs::EnvKind::FrozenLake => ALPHA_FROZEN_LAKE,
        qppo_core::envs::EnvKind::CartPole => ALPHA_CART_POLE,
    }
}
