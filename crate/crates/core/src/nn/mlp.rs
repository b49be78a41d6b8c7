use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

use super::init::orthogonal;

/// Fully connected network with tanh hidden activations and a linear output.
///
/// Parameters are stored flat: for every layer, the `out × in` weights (row-major)
/// followed by the `out` biases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    pub params: Vec<f64>,
}

/// Layer activations recorded during a forward pass, for backpropagation.
#[derive(Debug, Clone)]
pub struct MlpCache {
    /// `activations[0]` is the input, `activations[k]` the output of layer `k`.
    pub activations: Vec<Vec<f64>>,
}

impl Mlp {
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return config_err(format!("invalid layer sizes {sizes:?}"));
        }
        let n = sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum();
        Ok(Self {
            sizes: sizes.to_vec(),
            params: vec![0.0; n],
        })
    }

    /// Orthogonal weights (gain √2 on hidden layers, `output_gain` on the last) and zero biases.
    pub fn orthogonal<R: Rng + ?Sized>(sizes: &[usize], output_gain: f64, rng: &mut R) -> Result<Self> {
        let mut net = Self::zeros(sizes)?;
        let n_layers = sizes.len() - 1;
        let mut offset = 0;
        for k in 0..n_layers {
            let (fan_in, fan_out) = (sizes[k], sizes[k + 1]);
            let gain = if k + 1 == n_layers {
                output_gain
            } else {
                std::f64::consts::SQRT_2
            };
            let w = orthogonal(fan_out, fan_in, gain, rng);
            net.params[offset..offset + w.len()].copy_from_slice(&w);
            offset += fan_in * fan_out + fan_out;
        }
        Ok(net)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn param_count(&self) -> usize {
        self.params.len()
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    /// Offsets of (weights, biases) for layer `k`.
    pub(crate) fn layer_offsets(&self, k: usize) -> (usize, usize) {
        let mut offset = 0;
        for w in self.sizes.windows(2).take(k) {
            offset += w[0] * w[1] + w[1];
        }
        (offset, offset + self.sizes[k] * self.sizes[k + 1])
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(input)?.activations.pop().expect("output layer"))
    }

    pub fn forward_cached(&self, input: &[f64]) -> Result<MlpCache> {
        if input.len() != self.input_dim() {
            return config_err(format!(
                "network expects {} inputs, got {}",
                self.input_dim(),
                input.len()
            ));
        }
        let n_layers = self.sizes.len() - 1;
        let mut activations = Vec::with_capacity(n_layers + 1);
        activations.push(input.to_vec());
        for k in 0..n_layers {
            let (fan_in, fan_out) = (self.sizes[k], self.sizes[k + 1]);
            let (w_off, b_off) = self.layer_offsets(k);
            let x = &activations[k];
            let mut out = self.params[b_off..b_off + fan_out].to_vec();
            for (o, acc) in out.iter_mut().enumerate() {
                let row = &self.params[w_off + o * fan_in..w_off + (o + 1) * fan_in];
                *acc += row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
            }
            if k + 1 < n_layers {
                out.iter_mut().for_each(|v| *v = v.tanh());
            }
            activations.push(out);
        }
        Ok(MlpCache { activations })
    }
}
