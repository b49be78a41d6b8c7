use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Env, EnvKind, Observation};

/// Result of stepping every environment once.
#[derive(Debug, Clone)]
pub struct VecStep {
    /// Next observations; finished environments already show their reset state.
    pub obs: Vec<Observation>,
    pub rewards: Vec<f64>,
    pub dones: Vec<bool>,
    /// Returns of episodes that ended on this step.
    pub finished_returns: Vec<f64>,
}

/// Synchronous vector of independent environments with auto-reset.
pub struct VecEnv {
    envs: Vec<Box<dyn Env>>,
    rngs: Vec<ChaCha8Rng>,
    running_returns: Vec<f64>,
    current: Vec<Observation>,
    timesteps: u64,
}

impl VecEnv {
    pub fn new(kind: EnvKind, n: usize) -> Self {
        Self {
            envs: (0..n).map(|_| kind.make()).collect(),
            rngs: Vec::new(),
            running_returns: vec![0.0; n],
            current: Vec::new(),
            timesteps: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    /// Total environment steps taken since construction.
    pub fn timesteps(&self) -> u64 {
        self.timesteps
    }

    pub fn observations(&self) -> &[Observation] {
        &self.current
    }

    /// Resets all environments; environment `i` draws from stream `i` of `seed`.
    pub fn reset(&mut self, seed: u64) -> Vec<Observation> {
        self.rngs = (0..self.envs.len())
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                rng
            })
            .collect();
        self.current = self
            .envs
            .iter_mut()
            .zip(&mut self.rngs)
            .map(|(env, rng)| env.reset(rng))
            .collect();
        self.running_returns.iter_mut().for_each(|r| *r = 0.0);
        self.current.clone()
    }

    pub fn step(&mut self, actions: &[usize]) -> Result<VecStep> {
        if actions.len() != self.envs.len() {
            return Err(Error::Usage(format!(
                "{} actions for {} environments",
                actions.len(),
                self.envs.len()
            )));
        }
        if self.current.is_empty() {
            return Err(Error::Usage("vector environment stepped before reset".into()));
        }
        let n = self.envs.len();
        let mut out = VecStep {
            obs: Vec::with_capacity(n),
            rewards: Vec::with_capacity(n),
            dones: Vec::with_capacity(n),
            finished_returns: Vec::new(),
        };
        for (i, &action) in actions.iter().enumerate().take(n) {
            let t = self.envs[i].step(action)?;
            self.running_returns[i] += t.reward;
            let obs = if t.done {
                out.finished_returns.push(self.running_returns[i]);
                self.running_returns[i] = 0.0;
                self.envs[i].reset(&mut self.rngs[i])
            } else {
                t.obs
            };
            out.obs.push(obs);
            out.rewards.push(t.reward);
            out.dones.push(t.done);
        }
        self.timesteps += n as u64;
        self.current = out.obs.clone();
        Ok(out)
    }
}
