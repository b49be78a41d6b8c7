use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::autograd::{actor_grad_with, mlp_backward, ActorGrad, CircuitGradient};
use crate::circuits::{actor_forward, count_parameters, softmax, CircuitConfig, CircuitParams};
use crate::envs::{EnvKind, Observation};
use crate::error::{config_err, Result};
use crate::nn::{InitStrategy, Mlp};

use super::loss::{clipped_value, normalize_advantages, ppo_loss, surrogate, LossTerms};
use super::sampling::{entropy, LOG_PROB_FLOOR};
use super::train::HyperParams;

const CRITIC_HIDDEN: [usize; 2] = [64, 64];

/// Which actor to train.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActorSpec {
    Quantum { circuit: CircuitConfig, init: InitStrategy },
    Classical { hidden: Vec<usize> },
}

impl ActorSpec {
    /// Trainable parameter count of the actor for `env`.
    pub fn param_count(&self, env: EnvKind) -> usize {
        match self {
            ActorSpec::Quantum { circuit, .. } => count_parameters(circuit),
            ActorSpec::Classical { hidden } => {
                let sizes = classical_sizes(env, hidden);
                sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
            }
        }
    }

    pub fn validate(&self, env: EnvKind) -> Result<()> {
        match self {
            ActorSpec::Quantum { circuit, .. } => {
                circuit.validate()?;
                if circuit.n_actions() != env.n_actions() {
                    return config_err(format!(
                        "circuit yields {} actions, {env:?} has {}",
                        circuit.n_actions(),
                        env.n_actions()
                    ));
                }
                let binary = circuit.encoding == crate::circuits::Encoding::Binary;
                if binary != (env == EnvKind::FrozenLake) {
                    return config_err(format!("{:?} encoding does not fit {env:?}", circuit.encoding));
                }
                Ok(())
            }
            ActorSpec::Classical { hidden } if hidden.contains(&0) => {
                config_err(format!("invalid hidden sizes {hidden:?}"))
            }
            ActorSpec::Classical { .. } => Ok(()),
        }
    }
}

fn classical_sizes(env: EnvKind, hidden: &[usize]) -> Vec<usize> {
    let mut sizes = vec![env.feature_dim()];
    sizes.extend_from_slice(hidden);
    sizes.push(env.n_actions());
    sizes
}

/// The policy network.
#[derive(Debug, Clone, PartialEq)]
pub enum Actor {
    Quantum {
        config: CircuitConfig,
        params: CircuitParams,
    },
    Classical(Mlp),
}

/// Independently optimised parameter groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Group {
    Critic,
    /// Circuit θ or classical actor weights.
    Actor,
    InputScaling,
    OutputScaling,
}

/// Gradients aligned with [`Agent::groups`].
#[derive(Debug, Clone, PartialEq)]
pub struct AgentGrad {
    pub groups: Vec<(Group, Vec<f64>)>,
}

/// One PPO minibatch. Advantages are raw; normalisation happens inside the loss.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Minibatch {
    pub obs: Vec<Observation>,
    pub actions: Vec<usize>,
    pub old_logp: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
    pub old_values: Vec<f64>,
}

impl Minibatch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// Actor-critic pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Agent {
    pub actor: Actor,
    pub critic: Mlp,
    pub gradient: CircuitGradient,
}

impl Agent {
    /// Fresh agent: orthogonal critic (output gain 1), orthogonal classical actor (output gain 0.01)
    /// or a circuit initialised with the spec's strategy.
    pub fn new<R: Rng + ?Sized>(env: EnvKind, spec: &ActorSpec, rng: &mut R) -> Result<Self> {
        spec.validate(env)?;
        let mut critic_sizes = vec![env.feature_dim()];
        critic_sizes.extend_from_slice(&CRITIC_HIDDEN);
        critic_sizes.push(1);
        let critic = Mlp::orthogonal(&critic_sizes, 1.0, rng)?;
        let actor = match spec {
            ActorSpec::Quantum { circuit, init } => Actor::Quantum {
                config: circuit.clone(),
                params: CircuitParams::init(circuit, *init, rng),
            },
            ActorSpec::Classical { hidden } => {
                Actor::Classical(Mlp::orthogonal(&classical_sizes(env, hidden), 0.01, rng)?)
            }
        };
        Ok(Self {
            actor,
            critic,
            gradient: CircuitGradient::default(),
        })
    }

    pub fn actor_param_count(&self) -> usize {
        match &self.actor {
            Actor::Quantum { config, .. } => count_parameters(config),
            Actor::Classical(net) => net.param_count(),
        }
    }

    pub fn policy(&self, obs: &Observation) -> Result<Vec<f64>> {
        match &self.actor {
            Actor::Quantum { config, params } => Ok(actor_forward(config, params, obs)?.probs),
            Actor::Classical(net) => Ok(softmax(&net.forward(&obs.features())?)),
        }
    }

    pub fn value(&self, obs: &Observation) -> Result<f64> {
        Ok(self.critic.forward(&obs.features())?[0])
    }

    /// Output-scaling factors, empty when the actor has none.
    pub fn beta(&self) -> &[f64] {
        match &self.actor {
            Actor::Quantum { params, .. } => &params.beta,
            Actor::Classical(_) => &[],
        }
    }

    /// Non-empty parameter groups in a fixed order.
    pub fn groups(&self) -> Vec<(Group, &[f64])> {
        let mut out: Vec<(Group, &[f64])> = vec![(Group::Critic, &self.critic.params)];
        match &self.actor {
            Actor::Quantum { params, .. } => {
                out.push((Group::Actor, &params.theta));
                out.push((Group::InputScaling, &params.lambda));
                out.push((Group::OutputScaling, &params.beta));
            }
            Actor::Classical(net) => out.push((Group::Actor, &net.params)),
        }
        out.retain(|(_, p)| !p.is_empty());
        out
    }

    /// Mutable view of [`Agent::groups`], same order.
    pub fn groups_mut(&mut self) -> Vec<(Group, &mut Vec<f64>)> {
        let mut out: Vec<(Group, &mut Vec<f64>)> = vec![(Group::Critic, &mut self.critic.params)];
        match &mut self.actor {
            Actor::Quantum { params, .. } => {
                out.push((Group::Actor, &mut params.theta));
                out.push((Group::InputScaling, &mut params.lambda));
                out.push((Group::OutputScaling, &mut params.beta));
            }
            Actor::Classical(net) => out.push((Group::Actor, &mut net.params)),
        }
        out.retain(|(_, p)| !p.is_empty());
        out
    }

    /// Combined PPO loss on a minibatch, forward only.
    pub fn minibatch_loss(&self, mb: &Minibatch, hp: &HyperParams) -> Result<LossTerms> {
        let adv = advantages(mb, hp);
        let n = mb.len();
        let (mut logp, mut ent, mut values) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for i in 0..n {
            let probs = self.policy(&mb.obs[i])?;
            logp[i] = probs[mb.actions[i]].max(LOG_PROB_FLOOR).ln();
            ent[i] = entropy(&probs);
            values[i] = self.value(&mb.obs[i])?;
        }
        let (terms, _) = ppo_loss(
            &mb.old_logp,
            &adv,
            &mb.returns,
            &mb.old_values,
            &logp,
            &ent,
            &values,
            hp.clip_coef,
            hp.value_coef,
            hp.entropy_coef,
        )?;
        Ok(terms)
    }

    /// Combined PPO loss and its gradient for every group.
    pub fn minibatch_loss_and_grad(&self, mb: &Minibatch, hp: &HyperParams) -> Result<(LossTerms, AgentGrad)> {
        if mb.is_empty() {
            return config_err("empty minibatch");
        }
        let adv = advantages(mb, hp);
        let n = mb.len();
        let inv = 1.0 / n as f64;
        let d_entropy = -hp.entropy_coef * inv;
        let (mut logp, mut ent, mut values) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);

        let mut critic_grad = vec![0.0; self.critic.param_count()];
        let mut quantum_grad = match &self.actor {
            Actor::Quantum { config, .. } => Some(ActorGrad::zeros(config)),
            Actor::Classical(_) => None,
        };
        let mut classical_grad = match &self.actor {
            Actor::Classical(net) => vec![0.0; net.param_count()],
            Actor::Quantum { .. } => Vec::new(),
        };

        for i in 0..n {
            let (obs, action) = (&mb.obs[i], mb.actions[i]);
            match &self.actor {
                Actor::Quantum { config, params } => {
                    let (out, g) = actor_grad_with(config, params, obs, self.gradient, |probs| {
                        let p_a = probs[action];
                        logp[i] = p_a.max(LOG_PROB_FLOOR).ln();
                        ent[i] = entropy(probs);
                        let d_logp = surrogate(mb.old_logp[i], adv[i], logp[i], hp.clip_coef).1 * inv;
                        probs
                            .iter()
                            .enumerate()
                            .map(|(k, &p)| {
                                let mut d = 0.0;
                                if k == action && p_a > LOG_PROB_FLOOR {
                                    d += d_logp / p_a;
                                }
                                if p > 0.0 {
                                    d -= d_entropy * (p.ln() + 1.0);
                                }
                                d
                            })
                            .collect()
                    })?;
                    debug_assert_eq!(out.probs.len(), config.n_actions());
                    quantum_grad.as_mut().expect("quantum actor").add_assign(&g);
                }
                Actor::Classical(net) => {
                    let cache = net.forward_cached(&obs.features())?;
                    let probs = softmax(cache.activations.last().expect("output layer"));
                    let p_a = probs[action];
                    logp[i] = p_a.max(LOG_PROB_FLOOR).ln();
                    ent[i] = entropy(&probs);
                    let d_logp = surrogate(mb.old_logp[i], adv[i], logp[i], hp.clip_coef).1 * inv;
                    let upstream: Vec<f64> = probs
                        .iter()
                        .enumerate()
                        .map(|(k, &p)| {
                            let mut d = 0.0;
                            if p_a > LOG_PROB_FLOOR {
                                d += d_logp * (if k == action { 1.0 } else { 0.0 } - p);
                            }
                            if p > 0.0 {
                                d -= d_entropy * p * (p.ln() + ent[i]);
                            }
                            d
                        })
                        .collect();
                    mlp_backward(net, &cache, &upstream, &mut classical_grad)?;
                }
            }
            let cache = self.critic.forward_cached(&obs.features())?;
            values[i] = cache.activations.last().expect("output layer")[0];
            let d_value =
                hp.value_coef * clipped_value(values[i], mb.old_values[i], mb.returns[i], hp.clip_coef).1 * inv;
            mlp_backward(&self.critic, &cache, &[d_value], &mut critic_grad)?;
        }

        let (terms, _) = ppo_loss(
            &mb.old_logp,
            &adv,
            &mb.returns,
            &mb.old_values,
            &logp,
            &ent,
            &values,
            hp.clip_coef,
            hp.value_coef,
            hp.entropy_coef,
        )?;

        let mut groups = vec![(Group::Critic, critic_grad)];
        match quantum_grad {
            Some(g) => {
                groups.push((Group::Actor, g.theta));
                groups.push((Group::InputScaling, g.lambda));
                groups.push((Group::OutputScaling, g.beta));
            }
            None => groups.push((Group::Actor, classical_grad)),
        }
        groups.retain(|(_, g)| !g.is_empty());
        Ok((terms, AgentGrad { groups }))
    }
}

fn advantages(mb: &Minibatch, hp: &HyperParams) -> Vec<f64> {
    if hp.norm_advantages {
        normalize_advantages(&mb.advantages)
    } else {
        mb.advantages.clone()
    }
}
