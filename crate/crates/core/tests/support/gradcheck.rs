//! Central finite-difference check of the combined PPO loss over every parameter group.

#![allow(dead_code)]

use qppo_core::autograd::CircuitGradient;
use qppo_core::circuits::{Architecture, CircuitConfig, Scaling};
use qppo_core::envs::{EnvKind, Observation};
use qppo_core::nn::InitStrategy;
use qppo_core::ppo::{ActorSpec, Agent, HyperParams, Minibatch};
use rand::Rng;

pub const FD_STEP: f64 = 1e-5;
/// Parameters probed per group; groups at most this large are probed exhaustively.
pub const PROBES_PER_GROUP: usize = 40;

pub struct ActorKind {
    pub name: &'static str,
    pub env: EnvKind,
    pub spec: ActorSpec,
}

fn quantum(circuit: CircuitConfig) -> ActorSpec {
    ActorSpec::Quantum {
        circuit,
        init: InitStrategy::Standard,
    }
}

/// Actor families covered by the gate.
pub fn actor_kinds() -> Vec<ActorKind> {
    let fl = EnvKind::FrozenLake;
    let cp = EnvKind::CartPole;
    vec![
        ActorKind {
            name: "standard",
            env: fl,
            spec: quantum(CircuitConfig::frozen_lake(Architecture::Standard).with_output_scaling(Scaling::Global)),
        },
        ActorKind {
            name: "standard-plain-head",
            env: fl,
            spec: quantum(CircuitConfig::frozen_lake(Architecture::Standard)),
        },
        ActorKind {
            name: "koelle",
            env: fl,
            spec: quantum(CircuitConfig::frozen_lake(Architecture::Koelle).with_output_scaling(Scaling::Local)),
        },
        ActorKind {
            name: "jerbi",
            env: fl,
            spec: quantum(CircuitConfig::frozen_lake(Architecture::Jerbi).with_output_scaling(Scaling::Global)),
        },
        ActorKind {
            name: "standard-cartpole-input-scaling",
            env: cp,
            spec: quantum(
                CircuitConfig::cart_pole()
                    .with_layers(4)
                    .with_input_scaling(Scaling::Local)
                    .with_output_scaling(Scaling::Global),
            ),
        },
        ActorKind {
            name: "jerbi-cartpole-global-input",
            env: cp,
            spec: quantum({
                let mut c = CircuitConfig::cart_pole().with_input_scaling(Scaling::Global);
                c.architecture = Architecture::Jerbi;
                c.final_entanglement = qppo_core::circuits::FinalEntanglement::Full;
                c.with_output_scaling(Scaling::Local).with_layers(3)
            }),
        },
        ActorKind {
            name: "mlp",
            env: fl,
            spec: ActorSpec::Classical { hidden: vec![3] },
        },
        ActorKind {
            name: "mlp-cartpole",
            env: cp,
            spec: ActorSpec::Classical { hidden: vec![5, 5] },
        },
    ]
}

fn random_obs(env: EnvKind, rng: &mut impl Rng) -> Observation {
    match env {
        EnvKind::FrozenLake => Observation::Discrete(rng.random_range(0..16)),
        EnvKind::CartPole => Observation::Continuous([
            rng.random_range(-2.4..2.4),
            rng.random_range(-3.0..3.0),
            rng.random_range(-0.2..0.2),
            rng.random_range(-3.0..3.0),
        ]),
    }
}

/// Random agent whose parameters are pushed away from their structured initial values.
pub fn random_agent(kind: &ActorKind, rng: &mut impl Rng) -> Agent {
    let mut agent = Agent::new(kind.env, &kind.spec, rng).unwrap();
    for (_, params) in agent.groups_mut() {
        for p in params.iter_mut() {
            *p += rng.random_range(-0.3..0.3);
        }
    }
    agent
}

/// Minibatch whose stored log-probabilities and values are near, but not at, the current agent's.
pub fn random_minibatch(agent: &Agent, env: EnvKind, n: usize, rng: &mut impl Rng) -> Minibatch {
    let mut mb = Minibatch::default();
    for _ in 0..n {
        let obs = random_obs(env, rng);
        let probs = agent.policy(&obs).unwrap();
        let action = rng.random_range(0..probs.len());
        mb.old_logp
            .push(probs[action].max(1e-12).ln() + rng.random_range(-0.4..0.4));
        mb.old_values
            .push(agent.value(&obs).unwrap() + rng.random_range(-0.4..0.4));
        mb.advantages.push(rng.random_range(-2.0..2.0));
        mb.returns.push(rng.random_range(-1.0..1.0));
        mb.actions.push(action);
        mb.obs.push(obs);
    }
    mb
}

/// Worst `|a − f| / max(1, |f|)` over probed parameters of every group.
pub fn max_gradient_error(agent: &Agent, mb: &Minibatch, hp: &HyperParams, rng: &mut impl Rng) -> f64 {
    let (_, grad) = agent.minibatch_loss_and_grad(mb, hp).unwrap();
    let mut worst: f64 = 0.0;
    for (g, (_, analytic)) in grad.groups.iter().enumerate() {
        let len = analytic.len();
        let probes: Vec<usize> = if len <= PROBES_PER_GROUP {
            (0..len).collect()
        } else {
            (0..PROBES_PER_GROUP).map(|_| rng.random_range(0..len)).collect()
        };
        for i in probes {
            let eval = |delta: f64| {
                let mut a = agent.clone();
                a.groups_mut()[g].1[i] += delta;
                a.minibatch_loss(mb, hp).unwrap().total
            };
            let fd = (eval(FD_STEP) - eval(-FD_STEP)) / (2.0 * FD_STEP);
            worst = worst.max((analytic[i] - fd).abs() / fd.abs().max(1.0));
        }
    }
    worst
}

/// Runs the gate for `draws` random draws of `kind` with the given circuit gradient route.
pub fn gate(kind: &ActorKind, draws: usize, method: CircuitGradient, rng: &mut impl Rng) -> f64 {
    let hp = HyperParams::defaults(kind.env, &kind.spec);
    (0..draws)
        .map(|_| {
            let mut agent = random_agent(kind, rng);
            agent.gradient = method;
            let mb = random_minibatch(&agent, kind.env, 8, rng);
            max_gradient_error(&agent, &mb, &hp, rng)
        })
        .fold(0.0, f64::max)
}
