//! Exact gradients for the actor circuits and the classical networks.
//!
//! Circuit angles are differentiated either with the two-term parameter-shift rule
//! (`[E(φ+π/2) − E(φ−π/2)] / 2`, exact for half-angle Pauli rotations) or with an adjoint
//! sweep that yields the vector-Jacobian product in one backward pass. Both feed the same
//! chain rule through the policy head, the tanh remap and the input scaling.

use std::f64::consts::FRAC_PI_2;

use crate::circuits::{
    beta_for, build_tape, encode_observation, lambda_index, policy_head, remap_weight_derivative, ActorOutput,
    AngleSource, CircuitConfig, CircuitParams, Scaling,
};
use crate::envs::Observation;
use crate::error::{config_err, Result};
use crate::nn::{Mlp, MlpCache};
use crate::qsim::{self, Gate, StateVector};

/// How circuit-angle derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CircuitGradient {
    ParameterShift,
    #[default]
    Adjoint,
}

/// `d⟨Z_w⟩ / dφ_k` for every measured wire `w` and every gate `k` of a circuit.
#[derive(Debug, Clone)]
pub struct Jacobian {
    pub sources: Vec<AngleSource>,
    /// `rows[w][k]`; columns of non-rotation gates are zero.
    pub rows: Vec<Vec<f64>>,
}

/// Parameter-shift Jacobian of the measured expectations with respect to every gate angle.
pub fn circuit_jacobian(config: &CircuitConfig, params: &CircuitParams, obs: &Observation) -> Result<Jacobian> {
    let encoded = encode_observation(config, params, obs)?;
    let tape = build_tape(config, params, &encoded)?;
    let rows = shift_jacobian(&tape.gates, config.n_qubits, &config.measured_wires)?;
    Ok(Jacobian {
        sources: tape.sources,
        rows,
    })
}

/// Parameter-shift Jacobian of a bare gate list.
pub fn shift_jacobian(gates: &[Gate], n_qubits: usize, measured: &[usize]) -> Result<Vec<Vec<f64>>> {
    let n_out = qsim::run_circuit(gates, n_qubits, measured)?.len();
    let mut rows = vec![vec![0.0; gates.len()]; n_out];
    let mut shifted = gates.to_vec();
    for (k, g) in gates.iter().enumerate() {
        let Some(phi) = g.angle() else { continue };
        shifted[k] = g.with_angle(phi + FRAC_PI_2);
        let plus = qsim::run_circuit(&shifted, n_qubits, measured)?;
        shifted[k] = g.with_angle(phi - FRAC_PI_2);
        let minus = qsim::run_circuit(&shifted, n_qubits, measured)?;
        shifted[k] = *g;
        for w in 0..n_out {
            rows[w][k] = (plus[w] - minus[w]) / 2.0;
        }
    }
    Ok(rows)
}

/// Gradient of `Σ_w weights[w]·⟨Z_w⟩` with respect to every gate angle, by adjoint sweep.
///
/// Returns the expectations alongside the gradient. `weights` follows the ascending order
/// of `measured`.
pub fn adjoint_vjp(
    gates: &[Gate],
    n_qubits: usize,
    measured: &[usize],
    weights: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut wires = measured.to_vec();
    wires.sort_unstable();
    wires.dedup();
    if wires.len() != weights.len() {
        return config_err(format!("{} weights for {} measured wires", weights.len(), wires.len()));
    }
    let psi = qsim::final_state(gates, n_qubits)?;
    let expvals = qsim::measure(&psi, &wires)?;
    let grad = adjoint_from_state(gates, psi, &wires, weights);
    Ok((expvals, grad))
}

/// Adjoint sweep starting from the already-computed final state. `wires` must be sorted.
fn adjoint_from_state(gates: &[Gate], mut psi: StateVector, wires: &[usize], weights: &[f64]) -> Vec<f64> {
    let n_qubits = psi.n_qubits();
    let mut lam = psi.clone();
    lam.scale_diagonal(&StateVector::weighted_z_diagonal(n_qubits, wires, weights));

    let mut grad = vec![0.0; gates.len()];
    for (k, g) in gates.iter().enumerate().rev() {
        if let Some((pauli, wire)) = g.generator() {
            let mut gpsi = psi.clone();
            gpsi.apply_pauli(pauli, wire);
            grad[k] = lam.inner(&gpsi).im;
        }
        let inv = g.inverse();
        psi.apply_unchecked(&inv);
        lam.apply_unchecked(&inv);
    }
    grad
}

/// Gradient of a scalar loss with respect to the circuit parameter groups.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorGrad {
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
}

impl ActorGrad {
    pub fn zeros(config: &CircuitConfig) -> Self {
        Self {
            theta: vec![0.0; config.theta_len()],
            lambda: vec![0.0; config.lambda_len()],
            beta: vec![0.0; config.beta_len()],
        }
    }

    pub fn add_assign(&mut self, other: &ActorGrad) {
        for (a, b) in [
            (&mut self.theta, &other.theta),
            (&mut self.lambda, &other.lambda),
            (&mut self.beta, &other.beta),
        ] {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        }
    }
}

/// Backpropagates `upstream = dL/dp` through the shifted-normalisation head to `dL/dC`.
pub fn plain_head_backward(expvals: &[f64], upstream: &[f64]) -> Vec<f64> {
    let total: f64 = expvals.iter().map(|c| (c + 1.0).max(0.0)).sum();
    if total <= 0.0 {
        return vec![0.0; expvals.len()];
    }
    let probs: Vec<f64> = expvals.iter().map(|c| (c + 1.0).max(0.0) / total).collect();
    let mean: f64 = probs.iter().zip(upstream).map(|(p, u)| p * u).sum();
    upstream.iter().map(|u| (u - mean) / total).collect()
}

/// Backpropagates `dL/dp` through a softmax to `dL/dz`.
pub fn softmax_backward(probs: &[f64], upstream: &[f64]) -> Vec<f64> {
    let mean: f64 = probs.iter().zip(upstream).map(|(p, u)| p * u).sum();
    probs.iter().zip(upstream).map(|(p, u)| p * (u - mean)).collect()
}

/// Forward pass plus the gradient of a loss with upstream `dL/dp` over the action probabilities.
pub fn actor_grad(
    config: &CircuitConfig,
    params: &CircuitParams,
    obs: &Observation,
    upstream: &[f64],
    method: CircuitGradient,
) -> Result<(ActorOutput, ActorGrad)> {
    actor_grad_with(config, params, obs, method, |_| upstream.to_vec())
}

/// [`actor_grad`] with the upstream computed from the forward probabilities.
pub fn actor_grad_with(
    config: &CircuitConfig,
    params: &CircuitParams,
    obs: &Observation,
    method: CircuitGradient,
    upstream_of: impl FnOnce(&[f64]) -> Vec<f64>,
) -> Result<(ActorOutput, ActorGrad)> {
    let encoded = encode_observation(config, params, obs)?;
    let tape = build_tape(config, params, &encoded)?;
    let n = config.n_qubits;
    let wires = &config.measured_wires;

    // Expectations first; the head needs them before the circuit upstream is known.
    let state = qsim::final_state(&tape.gates, n)?;
    let expvals = qsim::measure(&state, wires)?;
    let probs = policy_head(config, params, &expvals);
    let upstream = upstream_of(&probs);
    if upstream.len() != config.n_actions() {
        return config_err(format!(
            "{} upstream entries for {} actions",
            upstream.len(),
            config.n_actions()
        ));
    }
    let upstream = upstream.as_slice();

    let mut grad = ActorGrad::zeros(config);
    let d_expvals = match config.output_scaling {
        Scaling::None => plain_head_backward(&expvals, upstream),
        scaling => {
            let dz = softmax_backward(&probs, upstream);
            for (i, (dzi, c)) in dz.iter().zip(&expvals).enumerate() {
                let slot = if scaling == Scaling::Global { 0 } else { i };
                grad.beta[slot] += dzi * c;
            }
            dz.iter()
                .enumerate()
                .map(|(i, dzi)| dzi * beta_for(&params.beta, i))
                .collect()
        }
    };

    let d_angles = match method {
        CircuitGradient::Adjoint => adjoint_from_state(&tape.gates, state, wires, &d_expvals),
        CircuitGradient::ParameterShift => {
            let rows = shift_jacobian(&tape.gates, n, wires)?;
            (0..tape.gates.len())
                .map(|k| rows.iter().zip(&d_expvals).map(|(r, u)| r[k] * u).sum())
                .collect()
        }
    };

    for (source, d) in tape.sources.iter().zip(&d_angles) {
        match *source {
            AngleSource::Fixed => {}
            AngleSource::Theta(i) => grad.theta[i] += d * remap_weight_derivative(params.theta[i]),
            AngleSource::Encoding { layer, dim } => {
                if config.input_scaling == Scaling::None {
                    continue;
                }
                let Observation::Continuous(s) = obs else { continue };
                let idx = lambda_index(config.input_scaling, layer, dim);
                let t = (params.lambda[idx] * s[dim]).tanh();
                grad.lambda[idx] += d * std::f64::consts::PI * (1.0 - t * t) * s[dim];
            }
        }
    }
    Ok((ActorOutput { probs, expvals }, grad))
}

/// Accumulates `d(upstream · output)/dparams` into `grads` from a cached forward pass.
pub fn mlp_backward(net: &Mlp, cache: &MlpCache, upstream: &[f64], grads: &mut [f64]) -> Result<()> {
    if upstream.len() != net.output_dim() || grads.len() != net.param_count() {
        return config_err("gradient buffers do not match the network shape");
    }
    let sizes = net.sizes();
    let n_layers = sizes.len() - 1;
    let mut delta = upstream.to_vec();
    for k in (0..n_layers).rev() {
        let (fan_in, fan_out) = (sizes[k], sizes[k + 1]);
        let (w_off, b_off) = net.layer_offsets(k);
        let x = &cache.activations[k];
        for o in 0..fan_out {
            grads[b_off + o] += delta[o];
            let row = &mut grads[w_off + o * fan_in..w_off + (o + 1) * fan_in];
            row.iter_mut().zip(x).for_each(|(g, xi)| *g += delta[o] * xi);
        }
        if k > 0 {
            // x is tanh(pre-activation) of the previous layer.
            let mut prev = vec![0.0; fan_in];
            for (o, &d) in delta.iter().enumerate().take(fan_out) {
                let row = &net.params[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                prev.iter_mut().zip(row).for_each(|(p, w)| *p += d * w);
            }
            delta = prev.iter().zip(x).map(|(p, h)| p * (1.0 - h * h)).collect();
        }
    }
    Ok(())
}

/// Gradient of `upstream · net(input)` with respect to all network parameters.
pub fn mlp_grad(net: &Mlp, input: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
    let cache = net.forward_cached(input)?;
    let mut grads = vec![0.0; net.param_count()];
    mlp_backward(net, &cache, upstream, &mut grads)?;
    Ok(grads)
}
