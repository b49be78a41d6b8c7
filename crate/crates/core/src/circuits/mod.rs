//! Re-uploading actor circuits.
//!
//! Three layouts are supported, all on four qubits:
//!
//! - `Standard`: RY encoding, remapped RX·RY·RZ per wire, cascading CNOTs `k → k+1`.
//!   With [`FinalEntanglement::Partial`] the last cascade becomes `0 → 2, 1 → 3`.
//! - `Koelle`: RX encoding, remapped RZ·RY·RZ per wire, circular CNOTs.
//! - `Jerbi`: Hadamards, an initial RZ·RY variational layer with circular CZ, then
//!   per layer an RY·RZ encoding followed by RZ·RY rotations and circular CZ.

mod encoding;
mod head;

use rand::Rng;
use serde::{Deserialize, Serialize};

pub(crate) use encoding::lambda_index;
pub use encoding::{
    encode_binary, input_scale, remap_weight, remap_weight_derivative, rescale_cartpole, CARTPOLE_LAMBDA_INIT,
};
pub(crate) use head::beta_for;
pub use head::{probs_plain, probs_softmax, softmax};

use crate::envs::Observation;
use crate::error::{config_err, Error, Result};
use crate::nn::InitStrategy;
use crate::qsim::{self, Gate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Standard,
    Koelle,
    Jerbi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    /// Frozen Lake grid index, one bit per wire.
    Binary,
    /// Cart Pole observation, one dimension per wire.
    Angle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    #[default]
    None,
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalEntanglement {
    #[default]
    Full,
    Partial,
}

/// Everything that determines the actor circuit's layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub architecture: Architecture,
    pub n_qubits: usize,
    /// Number of variational layers; also the re-uploading depth.
    pub n_layers: usize,
    pub encoding: Encoding,
    /// When false the encoding layer appears only once, before the first variational layer.
    pub reuploading: bool,
    pub input_scaling: Scaling,
    pub output_scaling: Scaling,
    pub measured_wires: Vec<usize>,
    pub final_entanglement: FinalEntanglement,
}

impl CircuitConfig {
    /// Frozen Lake layout: binary encoding, all wires measured, 6 layers (8 for `Jerbi`).
    pub fn frozen_lake(architecture: Architecture) -> Self {
        Self {
            architecture,
            n_qubits: 4,
            n_layers: if architecture == Architecture::Jerbi { 8 } else { 6 },
            encoding: Encoding::Binary,
            reuploading: true,
            input_scaling: Scaling::None,
            output_scaling: Scaling::None,
            measured_wires: vec![0, 1, 2, 3],
            final_entanglement: FinalEntanglement::Full,
        }
    }

    /// Cart Pole layout: standard architecture, angle encoding, last two wires measured.
    pub fn cart_pole() -> Self {
        Self {
            architecture: Architecture::Standard,
            n_qubits: 4,
            n_layers: 6,
            encoding: Encoding::Angle,
            reuploading: true,
            input_scaling: Scaling::None,
            output_scaling: Scaling::None,
            measured_wires: vec![2, 3],
            final_entanglement: FinalEntanglement::Partial,
        }
    }

    pub fn with_output_scaling(mut self, s: Scaling) -> Self {
        self.output_scaling = s;
        self
    }

    pub fn with_input_scaling(mut self, s: Scaling) -> Self {
        self.input_scaling = s;
        self
    }

    pub fn with_layers(mut self, n: usize) -> Self {
        self.n_layers = n;
        self
    }

    pub fn with_reuploading(mut self, on: bool) -> Self {
        self.reuploading = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits != 4 {
            return config_err(format!("circuits need exactly 4 qubits, got {}", self.n_qubits));
        }
        if self.n_layers == 0 {
            return config_err("circuit needs at least one layer");
        }
        let mut wires = self.measured_wires.clone();
        wires.sort_unstable();
        wires.dedup();
        if wires != self.measured_wires || wires.iter().any(|&w| w >= self.n_qubits) {
            return config_err(format!(
                "measured wires {:?} must be distinct, ascending and in range",
                self.measured_wires
            ));
        }
        match self.encoding {
            Encoding::Binary if wires != [0, 1, 2, 3] => return config_err("binary encoding measures all four wires"),
            Encoding::Angle if wires != [2, 3] => {
                return config_err("angle encoding measures exactly the last two wires")
            }
            _ => {}
        }
        if self.encoding == Encoding::Binary && self.input_scaling != Scaling::None {
            return config_err("input scaling applies to angle encoding only");
        }
        if self.final_entanglement == FinalEntanglement::Partial && self.architecture != Architecture::Standard {
            return config_err("partial final entanglement is defined for the standard layout only");
        }
        Ok(())
    }

    pub fn n_actions(&self) -> usize {
        self.measured_wires.len()
    }

    fn rotations_per_wire(&self) -> usize {
        match self.architecture {
            Architecture::Standard | Architecture::Koelle => 3,
            Architecture::Jerbi => 2,
        }
    }

    pub fn theta_len(&self) -> usize {
        let layers = match self.architecture {
            Architecture::Jerbi => self.n_layers + 1,
            _ => self.n_layers,
        };
        layers * self.n_qubits * self.rotations_per_wire()
    }

    /// Number of encoding layers actually placed in the circuit.
    pub fn encoding_layers(&self) -> usize {
        if self.reuploading {
            self.n_layers
        } else {
            1
        }
    }

    pub fn lambda_len(&self) -> usize {
        match self.input_scaling {
            Scaling::None => 0,
            Scaling::Global => self.n_qubits,
            Scaling::Local => self.n_qubits * self.encoding_layers(),
        }
    }

    pub fn beta_len(&self) -> usize {
        match self.output_scaling {
            Scaling::None => 0,
            Scaling::Global => 1,
            Scaling::Local => self.n_actions(),
        }
    }
}

/// Total trainable actor parameters: `|θ| + |λ| + |β|`.
pub fn count_parameters(config: &CircuitConfig) -> usize {
    config.theta_len() + config.lambda_len() + config.beta_len()
}

/// Trainable actor parameters. `theta` holds raw values before the tanh remap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
}

impl CircuitParams {
    /// Draws θ with `init`, sets λ to the cart-pole rescaling factors and β to 1.
    pub fn init<R: Rng + ?Sized>(config: &CircuitConfig, init: InitStrategy, rng: &mut R) -> Self {
        let theta = init.sample_vqc(config.theta_len(), rng);
        let lambda = CARTPOLE_LAMBDA_INIT
            .iter()
            .copied()
            .cycle()
            .take(config.lambda_len())
            .collect();
        let beta = vec![1.0; config.beta_len()];
        Self { theta, lambda, beta }
    }

    pub fn zeros(config: &CircuitConfig) -> Self {
        Self {
            theta: vec![0.0; config.theta_len()],
            lambda: vec![0.0; config.lambda_len()],
            beta: vec![0.0; config.beta_len()],
        }
    }

    pub fn check(&self, config: &CircuitConfig) -> Result<()> {
        let want = (config.theta_len(), config.lambda_len(), config.beta_len());
        let got = (self.theta.len(), self.lambda.len(), self.beta.len());
        if want != got {
            return config_err(format!("parameter sizes (θ, λ, β) = {got:?}, circuit expects {want:?}"));
        }
        if let Some(v) = self
            .theta
            .iter()
            .chain(&self.lambda)
            .chain(&self.beta)
            .find(|v| !v.is_finite())
        {
            return Err(Error::Numeric(format!("non-finite circuit parameter {v}")));
        }
        Ok(())
    }
}

/// Where a rotation angle in the circuit comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleSource {
    /// Not a rotation, or a rotation with no trainable dependence.
    Fixed,
    /// `π·tanh(θ[i])`.
    Theta(usize),
    /// Encoding of input dimension `dim` on encoding layer `layer`.
    Encoding { layer: usize, dim: usize },
}

/// A built circuit together with the origin of every rotation angle.
#[derive(Debug, Clone)]
pub struct Tape {
    pub gates: Vec<Gate>,
    pub sources: Vec<AngleSource>,
}

impl Tape {
    fn push(&mut self, gate: Gate, source: AngleSource) {
        self.gates.push(gate);
        self.sources.push(source);
    }
}

/// Per-encoding-layer input angles for an observation, including input scaling.
pub fn encode_observation(config: &CircuitConfig, params: &CircuitParams, obs: &Observation) -> Result<Vec<[f64; 4]>> {
    let layers = config.encoding_layers();
    match (config.encoding, obs) {
        (Encoding::Binary, Observation::Discrete(s)) => Ok(vec![encode_binary(*s)?; layers]),
        (Encoding::Angle, Observation::Continuous(s)) => match config.input_scaling {
            Scaling::None => Ok(vec![rescale_cartpole(*s)?; layers]),
            mode => (0..layers).map(|l| input_scale(*s, &params.lambda, l, mode)).collect(),
        },
        (enc, obs) => Err(Error::Encoding(format!(
            "observation {obs:?} does not match {enc:?} encoding"
        ))),
    }
}

/// Builds the full gate sequence for `config` from raw parameters and per-layer input angles.
pub fn build_actor_circuit(config: &CircuitConfig, params: &CircuitParams, encoded: &[[f64; 4]]) -> Result<Vec<Gate>> {
    Ok(build_tape(config, params, encoded)?.gates)
}

pub fn build_tape(config: &CircuitConfig, params: &CircuitParams, encoded: &[[f64; 4]]) -> Result<Tape> {
    config.validate()?;
    params.check(config)?;
    if encoded.len() != config.encoding_layers() {
        return config_err(format!(
            "{} encoded layers supplied, circuit has {}",
            encoded.len(),
            config.encoding_layers()
        ));
    }
    let n = config.n_qubits;
    let mut tape = Tape {
        gates: Vec::new(),
        sources: Vec::new(),
    };
    let angle = |i: usize| remap_weight(params.theta[i]);
    let encodes = |layer: usize| layer == 0 || config.reuploading;
    let enc_index = |layer: usize| if config.reuploading { layer } else { 0 };

    match config.architecture {
        Architecture::Standard | Architecture::Koelle => {
            let koelle = config.architecture == Architecture::Koelle;
            for layer in 0..config.n_layers {
                if encodes(layer) {
                    let e = enc_index(layer);
                    for (wire, &a) in encoded[e].iter().enumerate().take(n) {
                        let g = if koelle {
                            Gate::Rx { wire, angle: a }
                        } else {
                            Gate::Ry { wire, angle: a }
                        };
                        tape.push(g, AngleSource::Encoding { layer: e, dim: wire });
                    }
                }
                for wire in 0..n {
                    let base = (layer * n + wire) * 3;
                    let (a0, a1, a2) = (angle(base)?, angle(base + 1)?, angle(base + 2)?);
                    let rots = if koelle {
                        [
                            Gate::Rz { wire, angle: a0 },
                            Gate::Ry { wire, angle: a1 },
                            Gate::Rz { wire, angle: a2 },
                        ]
                    } else {
                        [
                            Gate::Rx { wire, angle: a0 },
                            Gate::Ry { wire, angle: a1 },
                            Gate::Rz { wire, angle: a2 },
                        ]
                    };
                    for (r, g) in rots.into_iter().enumerate() {
                        tape.push(g, AngleSource::Theta(base + r));
                    }
                }
                let last = layer + 1 == config.n_layers;
                if koelle {
                    for c in 0..n {
                        tape.push(
                            Gate::Cnot {
                                control: c,
                                target: (c + 1) % n,
                            },
                            AngleSource::Fixed,
                        );
                    }
                } else if last && config.final_entanglement == FinalEntanglement::Partial {
                    tape.push(Gate::Cnot { control: 0, target: 2 }, AngleSource::Fixed);
                    tape.push(Gate::Cnot { control: 1, target: 3 }, AngleSource::Fixed);
                } else {
                    for c in 0..n - 1 {
                        tape.push(
                            Gate::Cnot {
                                control: c,
                                target: c + 1,
                            },
                            AngleSource::Fixed,
                        );
                    }
                }
            }
        }
        Architecture::Jerbi => {
            for wire in 0..n {
                tape.push(Gate::H { wire }, AngleSource::Fixed);
            }
            let variational = |tape: &mut Tape, block: usize| -> Result<()> {
                for wire in 0..n {
                    let base = (block * n + wire) * 2;
                    tape.push(
                        Gate::Rz {
                            wire,
                            angle: angle(base)?,
                        },
                        AngleSource::Theta(base),
                    );
                    tape.push(
                        Gate::Ry {
                            wire,
                            angle: angle(base + 1)?,
                        },
                        AngleSource::Theta(base + 1),
                    );
                }
                for a in 0..n {
                    tape.push(Gate::Cz { a, b: (a + 1) % n }, AngleSource::Fixed);
                }
                Ok(())
            };
            variational(&mut tape, 0)?;
            for layer in 0..config.n_layers {
                if encodes(layer) {
                    let e = enc_index(layer);
                    for (wire, &a) in encoded[e].iter().enumerate().take(n) {
                        let src = AngleSource::Encoding { layer: e, dim: wire };
                        tape.push(Gate::Ry { wire, angle: a }, src);
                        tape.push(Gate::Rz { wire, angle: a }, src);
                    }
                }
                variational(&mut tape, layer + 1)?;
            }
        }
    }
    Ok(tape)
}

/// Probabilities and raw expectations produced by the actor for one observation.
#[derive(Debug, Clone, PartialEq)]
pub struct ActorOutput {
    pub probs: Vec<f64>,
    pub expvals: Vec<f64>,
}

/// Applies the configured policy head to circuit expectations.
pub fn policy_head(config: &CircuitConfig, params: &CircuitParams, expvals: &[f64]) -> Vec<f64> {
    match config.output_scaling {
        Scaling::None => probs_plain(expvals),
        _ => probs_softmax(expvals, &params.beta),
    }
}

/// Encode, simulate, measure and normalise.
pub fn actor_forward(config: &CircuitConfig, params: &CircuitParams, obs: &Observation) -> Result<ActorOutput> {
    let encoded = encode_observation(config, params, obs)?;
    let gates = build_actor_circuit(config, params, &encoded)?;
    let expvals = qsim::run_circuit(&gates, config.n_qubits, &config.measured_wires)?;
    let probs = policy_head(config, params, &expvals);
    Ok(ActorOutput { probs, expvals })
}
