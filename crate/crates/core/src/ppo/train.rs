use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autograd::CircuitGradient;
use crate::circuits::Scaling;
use crate::envs::{EnvKind, Observation, VecEnv};
use crate::error::{config_err, Error, Result};
use crate::nn::{clip_grad_norm, Adam};

use super::agent::{Actor, ActorSpec, Agent, Group, Minibatch};
use super::gae::compute_gae;
use super::sampling::sample_action;
use super::schedule::LrSchedule;

/// PPO hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperParams {
    pub num_envs: usize,
    pub num_steps: usize,
    pub update_epochs: usize,
    pub num_minibatches: usize,
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_coef: f64,
    pub value_coef: f64,
    pub entropy_coef: f64,
    pub max_grad_norm: f64,
    pub norm_advantages: bool,
    pub critic_lr: f64,
    /// Circuit θ or classical actor weights.
    pub actor_lr: LrSchedule,
    /// Output scaling β, and λ under global input scaling.
    pub scaling_lr: f64,
}

impl HyperParams {
    /// Defaults for `actor` on `env`.
    pub fn defaults(env: EnvKind, actor: &ActorSpec) -> Self {
        let (actor_lr, scaling_lr) = match (env, actor) {
            (EnvKind::FrozenLake, ActorSpec::Classical { .. }) => (LrSchedule::Fixed { lr: 1e-2 }, 0.0),
            (EnvKind::CartPole, ActorSpec::Classical { .. }) => (LrSchedule::Fixed { lr: 1e-4 }, 0.0),
            (EnvKind::FrozenLake, ActorSpec::Quantum { circuit, .. }) => {
                let scaling = match (circuit.output_scaling, circuit.reuploading) {
                    (Scaling::Local, _) => 2.5e-2,
                    (_, true) => 5e-3,
                    (_, false) => 1e-3,
                };
                (Self::vqc_exp_decay(env), scaling)
            }
            (EnvKind::CartPole, ActorSpec::Quantum { .. }) => (Self::vqc_exp_decay(env), 2e-4),
        };
        Self {
            num_envs: 4,
            num_steps: 128,
            update_epochs: 4,
            num_minibatches: 4,
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_coef: 0.2,
            value_coef: 0.5,
            entropy_coef: 0.01,
            max_grad_norm: 0.5,
            norm_advantages: true,
            critic_lr: 2.5e-4,
            actor_lr,
            scaling_lr,
        }
    }

    /// Tuned constant circuit learning rate.
    pub fn vqc_fixed(env: EnvKind) -> LrSchedule {
        match env {
            EnvKind::FrozenLake => LrSchedule::Fixed { lr: 2.5e-3 },
            EnvKind::CartPole => LrSchedule::Fixed { lr: 5e-4 },
        }
    }

    /// Tuned decaying circuit learning rate.
    pub fn vqc_exp_decay(env: EnvKind) -> LrSchedule {
        match env {
            EnvKind::FrozenLake => LrSchedule::ExpDecay {
                start: 1e-2,
                end: 1e-4,
                half_life: 25_000.0,
            },
            EnvKind::CartPole => LrSchedule::ExpDecay {
                start: 2.5e-3,
                end: 1e-4,
                half_life: 100_000.0,
            },
        }
    }

    pub fn batch_size(&self) -> usize {
        self.num_envs * self.num_steps
    }

    pub fn minibatch_size(&self) -> usize {
        self.batch_size() / self.num_minibatches
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_envs == 0 || self.num_steps == 0 || self.update_epochs == 0 || self.num_minibatches == 0 {
            return config_err("envs, steps, epochs and minibatches must be positive");
        }
        if !self.batch_size().is_multiple_of(self.num_minibatches) {
            return config_err(format!(
                "batch size {} is not divisible into {} minibatches",
                self.batch_size(),
                self.num_minibatches
            ));
        }
        let reals = [
            ("gamma", self.gamma),
            ("gae_lambda", self.gae_lambda),
            ("clip_coef", self.clip_coef),
            ("value_coef", self.value_coef),
            ("entropy_coef", self.entropy_coef),
            ("max_grad_norm", self.max_grad_norm),
            ("critic_lr", self.critic_lr),
            ("scaling_lr", self.scaling_lr),
        ];
        if let Some((name, v)) = reals.iter().find(|(_, v)| !v.is_finite() || *v < 0.0) {
            return config_err(format!("{name} must be finite and non-negative, got {v}"));
        }
        self.actor_lr.validate().map_err(Error::Config)
    }
}

/// Everything needed to reproduce one training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub env: EnvKind,
    pub actor: ActorSpec,
    pub hyper: HyperParams,
    pub total_timesteps: u64,
    pub seed: u64,
    pub gradient: CircuitGradient,
}

impl TrainConfig {
    pub fn new(env: EnvKind, actor: ActorSpec, total_timesteps: u64, seed: u64) -> Self {
        let hyper = HyperParams::defaults(env, &actor);
        Self {
            env,
            actor,
            hyper,
            total_timesteps,
            seed,
            gradient: CircuitGradient::default(),
        }
    }

    pub fn num_updates(&self) -> usize {
        (self.total_timesteps / self.hyper.batch_size() as u64) as usize
    }
}

/// Per-update log line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateRecord {
    /// Environment timesteps collected so far.
    pub timestep: u64,
    /// Mean return of episodes finished during this update, carried forward when none finished.
    pub raw_return: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub lr_actor: f64,
    pub lr_scaling: Option<f64>,
    pub beta: Vec<f64>,
}

/// Output of [`train`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingLog {
    pub env: EnvKind,
    pub actor_params: usize,
    /// State before any update; its losses are zero and its return is 0.
    pub initial: UpdateRecord,
    pub records: Vec<UpdateRecord>,
    pub agent: Agent,
}

/// A run aborted by a numeric failure, with everything logged up to that point.
#[derive(Debug)]
pub struct TrainFailure {
    pub error: Error,
    pub partial: Option<Box<TrainingLog>>,
}

impl std::fmt::Display for TrainFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.partial {
            Some(log) => write!(f, "{} (after {} updates)", self.error, log.records.len()),
            None => write!(f, "{}", self.error),
        }
    }
}

impl std::error::Error for TrainFailure {}

impl From<Error> for TrainFailure {
    fn from(error: Error) -> Self {
        Self { error, partial: None }
    }
}

/// One rollout, `[step × env]` row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RolloutBatch {
    pub obs: Vec<Observation>,
    pub actions: Vec<usize>,
    pub logp: Vec<f64>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    pub values: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl RolloutBatch {
    pub fn minibatch(&self, indices: &[usize]) -> Minibatch {
        Minibatch {
            obs: indices.iter().map(|&i| self.obs[i]).collect(),
            actions: indices.iter().map(|&i| self.actions[i]).collect(),
            old_logp: indices.iter().map(|&i| self.logp[i]).collect(),
            advantages: indices.iter().map(|&i| self.advantages[i]).collect(),
            returns: indices.iter().map(|&i| self.returns[i]).collect(),
            old_values: indices.iter().map(|&i| self.values[i]).collect(),
        }
    }
}

/// Shuffles `0..batch` and splits it into consecutive minibatches of `size`.
pub fn minibatch_partition<R: Rng + ?Sized>(batch: usize, size: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..batch).collect();
    idx.shuffle(rng);
    idx.chunks(size.max(1)).map(<[usize]>::to_vec).collect()
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

const ENV_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

fn group_lr(group: Group, agent: &Agent, hp: &HyperParams, actor_lr: f64) -> f64 {
    match group {
        Group::Critic => hp.critic_lr,
        Group::Actor => actor_lr,
        Group::InputScaling => match &agent.actor {
            Actor::Quantum { config, .. } if config.input_scaling == Scaling::Global => hp.scaling_lr,
            _ => actor_lr,
        },
        Group::OutputScaling => hp.scaling_lr,
    }
}

fn scaling_lr_logged(agent: &Agent, hp: &HyperParams) -> Option<f64> {
    match &agent.actor {
        Actor::Quantum { config, .. }
            if config.output_scaling != Scaling::None || config.input_scaling == Scaling::Global =>
        {
            Some(hp.scaling_lr)
        }
        _ => None,
    }
}

/// Runs PPO for `total_timesteps / batch_size` updates.
///
/// All randomness derives from `config.seed`, so equal configs give identical logs.
pub fn train(config: &TrainConfig) -> std::result::Result<TrainingLog, TrainFailure> {
    let hp = &config.hyper;
    hp.validate()?;
    let mut agent = Agent::new(config.env, &config.actor, &mut stream(config.seed, 0))?;
    agent.gradient = config.gradient;
    let mut action_rng = stream(config.seed, 1);
    let mut shuffle_rng = stream(config.seed, 2);

    let mut envs = VecEnv::new(config.env, hp.num_envs);
    let mut obs = envs.reset(config.seed.wrapping_add(ENV_SEED_OFFSET));
    let mut optimizers: Vec<Adam> = agent.groups().iter().map(|(_, p)| Adam::new(p.len())).collect();

    let initial = UpdateRecord {
        timestep: 0,
        raw_return: 0.0,
        policy_loss: 0.0,
        value_loss: 0.0,
        entropy: 0.0,
        lr_actor: hp.actor_lr.lr_at(0),
        lr_scaling: scaling_lr_logged(&agent, hp),
        beta: agent.beta().to_vec(),
    };
    let mut log = TrainingLog {
        env: config.env,
        actor_params: agent.actor_param_count(),
        initial,
        records: Vec::new(),
        agent: agent.clone(),
    };
    let mut last_return = 0.0;

    for _ in 0..config.num_updates() {
        let outcome = run_update(
            &mut agent,
            &mut envs,
            &mut obs,
            &mut optimizers,
            hp,
            &mut action_rng,
            &mut shuffle_rng,
        );
        match outcome {
            Ok((lr_actor, finished, losses)) => {
                if !finished.is_empty() {
                    last_return = finished.iter().sum::<f64>() / finished.len() as f64;
                }
                log.records.push(UpdateRecord {
                    timestep: envs.timesteps(),
                    raw_return: last_return,
                    policy_loss: losses[0],
                    value_loss: losses[1],
                    entropy: losses[2],
                    lr_actor,
                    lr_scaling: scaling_lr_logged(&agent, hp),
                    beta: agent.beta().to_vec(),
                });
            }
            Err(error) => {
                log.agent = agent;
                return Err(TrainFailure {
                    error,
                    partial: Some(Box::new(log)),
                });
            }
        }
    }
    log.agent = agent;
    Ok(log)
}

/// Collects one rollout and optimises on it; returns `(actor lr, finished returns, mean losses)`.
fn run_update(
    agent: &mut Agent,
    envs: &mut VecEnv,
    obs: &mut Vec<Observation>,
    optimizers: &mut [Adam],
    hp: &HyperParams,
    action_rng: &mut ChaCha8Rng,
    shuffle_rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<f64>, [f64; 3])> {
    let lr_actor = hp.actor_lr.lr_at(envs.timesteps());
    let n = hp.num_envs;
    let mut batch = RolloutBatch::default();
    let mut finished = Vec::new();

    for _ in 0..hp.num_steps {
        let mut actions = Vec::with_capacity(n);
        for o in obs.iter() {
            let probs = agent.policy(o)?;
            let (a, logp, _) = sample_action(&probs, action_rng);
            batch.obs.push(*o);
            batch.actions.push(a);
            batch.logp.push(logp);
            batch.values.push(agent.value(o)?);
            actions.push(a);
        }
        let step = envs.step(&actions)?;
        batch.rewards.extend_from_slice(&step.rewards);
        batch.dones.extend_from_slice(&step.dones);
        finished.extend_from_slice(&step.finished_returns);
        *obs = step.obs;
    }
    let next_value = obs.iter().map(|o| agent.value(o)).collect::<Result<Vec<_>>>()?;
    let (adv, ret) = compute_gae(
        &batch.rewards,
        &batch.dones,
        &batch.values,
        &next_value,
        hp.gamma,
        hp.gae_lambda,
    );
    batch.advantages = adv;
    batch.returns = ret;

    let mut sums = [0.0; 3];
    let mut count = 0usize;
    for _ in 0..hp.update_epochs {
        for indices in minibatch_partition(batch.actions.len(), hp.minibatch_size(), shuffle_rng) {
            let mb = batch.minibatch(&indices);
            let (terms, grad) = agent.minibatch_loss_and_grad(&mb, hp)?;
            let mut grads: Vec<Vec<f64>> = grad.groups.into_iter().map(|(_, g)| g).collect();
            if let Some(bad) = grads.iter().flatten().find(|g| !g.is_finite()) {
                return Err(Error::Numeric(format!("non-finite gradient {bad}")));
            }
            {
                let mut views: Vec<&mut [f64]> = grads.iter_mut().map(Vec::as_mut_slice).collect();
                clip_grad_norm(&mut views, hp.max_grad_norm);
            }
            let lrs: Vec<f64> = agent
                .groups()
                .iter()
                .map(|(g, _)| group_lr(*g, agent, hp, lr_actor))
                .collect();
            for (((_, params), g), (opt, lr)) in agent
                .groups_mut()
                .into_iter()
                .zip(&grads)
                .zip(optimizers.iter_mut().zip(lrs))
            {
                opt.step(params, g, lr)?;
            }
            sums[0] += terms.policy;
            sums[1] += terms.value;
            sums[2] += terms.entropy;
            count += 1;
        }
    }
    let losses = sums.map(|s| s / count as f64);
    Ok((lr_actor, finished, losses))
}
