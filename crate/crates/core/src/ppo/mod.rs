//! Proximal policy optimisation over grouped actor and critic parameters.

mod agent;
mod gae;
mod loss;
mod sampling;
mod schedule;
mod train;

pub use agent::{ActorSpec, Agent, AgentGrad, Group, Minibatch};
pub use gae::compute_gae;
pub use loss::{normalize_advantages, ppo_loss, LossGrads, LossTerms};
pub use sampling::{entropy, sample_action, LOG_PROB_FLOOR};
pub use schedule::LrSchedule;
pub use train::{
    minibatch_partition, train, HyperParams, RolloutBatch, TrainConfig, TrainFailure, TrainingLog, UpdateRecord,
};
