//! State encodings and the tanh weight remapping.

use std::f64::consts::PI;

use crate::error::{config_err, Error, Result};

use super::Scaling;

/// Maps a raw variational parameter to a rotation angle in `(-π, π)`.
pub fn remap_weight(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::Numeric(format!("cannot remap non-finite parameter {theta}")));
    }
    Ok(PI * theta.tanh())
}

/// `dφ/dθ` of [`remap_weight`].
pub fn remap_weight_derivative(theta: f64) -> f64 {
    let t = theta.tanh();
    PI * (1.0 - t * t)
}

/// Binary encoding of a 16-state grid index, most significant bit first, each bit scaled by π.
pub fn encode_binary(state_index: usize) -> Result<[f64; 4]> {
    if state_index > 15 {
        return Err(Error::Encoding(format!(
            "state {state_index} cannot be binary-encoded on 4 qubits"
        )));
    }
    Ok(std::array::from_fn(|k| {
        if state_index >> (3 - k) & 1 == 1 {
            PI
        } else {
            0.0
        }
    }))
}

/// Manual rescaling of a cart-pole observation `(x, ẋ, φ, φ̇)` onto `[-π, π]`.
pub fn rescale_cartpole(s: [f64; 4]) -> Result<[f64; 4]> {
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite observation {s:?}")));
    }
    Ok([PI * s[0] / 4.8, PI * s[1].tanh(), PI * s[2] / 0.418, PI * s[3].tanh()])
}

/// Initial input-scaling factors that reproduce the manual cart-pole rescaling to first order.
pub const CARTPOLE_LAMBDA_INIT: [f64; 4] = [1.0 / 4.8, 1.0, 1.0 / 0.418, 1.0];

/// Index into `lambda` used for dimension `dim` on encoding layer `layer`.
pub(crate) fn lambda_index(mode: Scaling, layer: usize, dim: usize) -> usize {
    match mode {
        Scaling::Local => layer * 4 + dim,
        _ => dim,
    }
}

/// Trainable input scaling `π·tanh(λ·s)` for one encoding layer.
///
/// `Global` uses one factor per input dimension. `Local` uses four factors per layer,
/// laid out layer-major.
pub fn input_scale(s: [f64; 4], lambda: &[f64], layer: usize, mode: Scaling) -> Result<[f64; 4]> {
    match mode {
        Scaling::None => return config_err("input scaling requested with mode None"),
        Scaling::Global if lambda.len() != 4 => {
            return config_err(format!("global input scaling needs 4 factors, got {}", lambda.len()))
        }
        Scaling::Local if !lambda.len().is_multiple_of(4) || layer >= lambda.len() / 4 => {
            return config_err(format!(
                "local input scaling has {} factors, layer {layer} not covered",
                lambda.len()
            ))
        }
        _ => {}
    }
    if s.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric(format!("non-finite observation {s:?}")));
    }
    Ok(std::array::from_fn(|d| {
        PI * (lambda[lambda_index(mode, layer, d)] * s[d]).tanh()
    }))
}
