//! Seedable environments and a synchronous vector wrapper.

mod cart_pole;
mod frozen_lake;
mod vec_env;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use cart_pole::CartPole;
pub use frozen_lake::{FrozenLake, FL_EPISODE_CAP};
pub use vec_env::{VecEnv, VecStep};

use crate::error::Result;

/// What an environment shows the agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    /// Grid cell index.
    Discrete(usize),
    /// `(x, ẋ, φ, φ̇)` for Cart Pole.
    Continuous([f64; 4]),
}

impl Observation {
    /// Network input: one-hot over 16 cells for grid states, the raw vector otherwise.
    pub fn features(&self) -> Vec<f64> {
        match *self {
            Observation::Discrete(s) => {
                let mut v = vec![0.0; 16];
                if s < 16 {
                    v[s] = 1.0;
                }
                v
            }
            Observation::Continuous(s) => s.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    FrozenLake,
    CartPole,
}

impl EnvKind {
    pub fn n_actions(self) -> usize {
        match self {
            EnvKind::FrozenLake => 4,
            EnvKind::CartPole => 2,
        }
    }

    pub fn feature_dim(self) -> usize {
        match self {
            EnvKind::FrozenLake => 16,
            EnvKind::CartPole => 4,
        }
    }

    pub fn make(self) -> Box<dyn Env> {
        match self {
            EnvKind::FrozenLake => Box::new(FrozenLake::new()),
            EnvKind::CartPole => Box::new(CartPole::new()),
        }
    }
}

/// One environment transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub obs: Observation,
    pub reward: f64,
    pub done: bool,
}

pub trait Env: Send {
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Observation;
    /// Advances one step. Stepping a finished episode is a usage error.
    fn step(&mut self, action: usize) -> Result<Transition>;
    fn n_actions(&self) -> usize;
}
