//! TOML experiment configuration.
//!
//! Every field except `name`, `environment` and `[actor]` is optional and falls back to the
//! tuned defaults for the chosen environment and actor. [`Experiment::echo`] writes the fully
//! resolved configuration back out so a run directory documents exactly what was executed.

use std::path::{Path, PathBuf};

use qppo_core::circuits::{Architecture, CircuitConfig, FinalEntanglement, Scaling};
use qppo_core::envs::EnvKind;
use qppo_core::nn::InitStrategy;
use qppo_core::ppo::{ActorSpec, HyperParams, LrSchedule, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LabError, Result};
use crate::ewma::default_alpha;

/// Minimum number of seeds per experiment.
pub const MIN_SEEDS: usize = 3;

const DEFAULT_TIMESTEPS_FROZEN_LAKE: u64 = 150_000;
const DEFAULT_TIMESTEPS_CART_POLE: u64 = 500_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub environment: EnvKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_timesteps: Option<u64>,
    /// Relative paths are resolved against the output root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_alpha: Option<f64>,
    pub actor: ActorConfig,
    #[serde(default)]
    pub hyper: HyperOverrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ActorConfig {
    Quantum {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        architecture: Option<Architecture>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        layers: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        reuploading: Option<bool>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        input_scaling: Option<Scaling>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        output_scaling: Option<Scaling>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        final_entanglement: Option<FinalEntanglement>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        init: Option<InitStrategy>,
    },
    Classical {
        hidden: Vec<usize>,
    },
}

/// Optional overrides of [`HyperParams`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_envs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update_epochs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_minibatches: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gae_lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy_coef: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_grad_norm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_advantages: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub critic_lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor_lr: Option<LrSchedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling_lr: Option<f64>,
}

impl HyperOverrides {
    fn apply(&self, mut hp: HyperParams) -> HyperParams {
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = self.$f.clone() { hp.$f = v; } )* };
        }
        set!(
            num_envs,
            num_steps,
            update_epochs,
            num_minibatches,
            gamma,
            gae_lambda,
            clip_coef,
            value_coef,
            entropy_coef,
            max_grad_norm,
            norm_advantages,
            critic_lr,
            actor_lr,
            scaling_lr
        );
        hp
    }

    fn full(hp: &HyperParams) -> Self {
        Self {
            num_envs: Some(hp.num_envs),
            num_steps: Some(hp.num_steps),
            update_epochs: Some(hp.update_epochs),
            num_minibatches: Some(hp.num_minibatches),
            gamma: Some(hp.gamma),
            gae_lambda: Some(hp.gae_lambda),
            clip_coef: Some(hp.clip_coef),
            value_coef: Some(hp.value_coef),
            entropy_coef: Some(hp.entropy_coef),
            max_grad_norm: Some(hp.max_grad_norm),
            norm_advantages: Some(hp.norm_advantages),
            critic_lr: Some(hp.critic_lr),
            actor_lr: Some(hp.actor_lr),
            scaling_lr: Some(hp.scaling_lr),
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub env: EnvKind,
    pub actor: ActorSpec,
    pub hyper: HyperParams,
    pub seeds: Vec<u64>,
    pub total_timesteps: u64,
    pub output_dir: PathBuf,
    pub smoothing_alpha: f64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| LabError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            LabError::Config(msg) => LabError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    fn actor_spec(&self) -> Result<ActorSpec> {
        let env = self.environment;
        let spec = match &self.actor {
            ActorConfig::Classical { hidden } => ActorSpec::Classical { hidden: hidden.clone() },
            ActorConfig::Quantum {
                architecture,
                layers,
                reuploading,
                input_scaling,
                output_scaling,
                final_entanglement,
                init,
            } => {
                let arch = architecture.unwrap_or(Architecture::Standard);
                let mut circuit = match env {
                    EnvKind::FrozenLake => CircuitConfig::frozen_lake(arch),
                    EnvKind::CartPole => {
                        let mut c = CircuitConfig::cart_pole();
                        c.architecture = arch;
                        if arch != Architecture::Standard {
                            c.final_entanglement = FinalEntanglement::Full;
                        }
                        c
                    }
                };
                if let Some(n) = layers {
                    circuit = circuit.with_layers(*n);
                }
                if let Some(r) = reuploading {
                    circuit = circuit.with_reuploading(*r);
                }
                if let Some(s) = input_scaling {
                    circuit = circuit.with_input_scaling(*s);
                }
                if let Some(s) = output_scaling {
                    circuit = circuit.with_output_scaling(*s);
                }
                if let Some(f) = final_entanglement {
                    circuit.final_entanglement = *f;
                }
                let init = init.unwrap_or(match env {
                    EnvKind::FrozenLake => InitStrategy::Standard,
                    EnvKind::CartPole => InitStrategy::Small,
                });
                ActorSpec::Quantum { circuit, init }
            }
        };
        spec.validate(env)?;
        Ok(spec)
    }

    /// Fills in defaults and validates. Relative output paths are joined onto `output_root`.
    pub fn resolve(&self, output_root: &Path) -> Result<Experiment> {
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return Err(LabError::Config(format!("invalid experiment name {:?}", self.name)));
        }
        let env = self.environment;
        let actor = self.actor_spec()?;
        let hyper = self.hyper.apply(HyperParams::defaults(env, &actor));
        hyper.validate()?;
        let seeds = self.seeds.clone().unwrap_or_else(|| (0..MIN_SEEDS as u64).collect());
        if seeds.len() < MIN_SEEDS {
            return Err(LabError::Config(format!(
                "at least {MIN_SEEDS} seeds are required, got {}",
                seeds.len()
            )));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(LabError::Config(format!("duplicate seeds in {seeds:?}")));
        }
        let total_timesteps = self.total_timesteps.unwrap_or(match env {
            EnvKind::FrozenLake => DEFAULT_TIMESTEPS_FROZEN_LAKE,
            EnvKind::CartPole => DEFAULT_TIMESTEPS_CART_POLE,
        });
        let smoothing_alpha = self.smoothing_alpha.unwrap_or(default_alpha(env));
        if !(smoothing_alpha > 0.0 && smoothing_alpha <= 1.0) {
            return Err(LabError::Config(format!(
                "smoothing_alpha {smoothing_alpha} is outside (0, 1]"
            )));
        }
        let dir = self.output_dir.clone().unwrap_or_else(|| PathBuf::from(&self.name));
        let output_dir = if dir.is_absolute() { dir } else { output_root.join(dir) };
        Ok(Experiment {
            name: self.name.clone(),
            env,
            actor,
            hyper,
            seeds,
            total_timesteps,
            output_dir,
            smoothing_alpha,
        })
    }
}

impl Experiment {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            env: self.env,
            actor: self.actor.clone(),
            hyper: self.hyper.clone(),
            total_timesteps: self.total_timesteps,
            seed,
            gradient: Default::default(),
        }
    }

    pub fn actor_params(&self) -> usize {
        self.actor.param_count(self.env)
    }

    /// The resolved configuration with every default written out.
    pub fn echo(&self) -> ExperimentConfig {
        let actor = match &self.actor {
            ActorSpec::Classical { hidden } => ActorConfig::Classical { hidden: hidden.clone() },
            ActorSpec::Quantum { circuit, init } => ActorConfig::Quantum {
                architecture: Some(circuit.architecture),
                layers: Some(circuit.n_layers),
                reuploading: Some(circuit.reuploading),
                input_scaling: Some(circuit.input_scaling),
                output_scaling: Some(circuit.output_scaling),
                final_entanglement: Some(circuit.final_entanglement),
                init: Some(*init),
            },
        };
        ExperimentConfig {
            name: self.name.clone(),
            environment: self.env,
            seeds: Some(self.seeds.clone()),
            total_timesteps: Some(self.total_timesteps),
            output_dir: Some(self.output_dir.clone()),
            smoothing_alpha: Some(self.smoothing_alpha),
            actor,
            hyper: HyperOverrides::full(&self.hyper),
        }
    }

    pub fn echo_toml(&self) -> Result<String> {
        toml::to_string(&self.echo()).map_err(|e| LabError::Config(e.to_string()))
    }
}
