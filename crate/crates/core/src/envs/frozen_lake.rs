use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Env, Observation, Transition};

const MAP: [&[u8; 4]; 4] = [b"SFFF", b"FHFH", b"FFFH", b"HFFG"];

/// Steps after which an episode is cut off.
pub const FL_EPISODE_CAP: usize = 200;

const GOAL_REWARD: f64 = 1.0;
const HOLE_PENALTY: f64 = -0.2;
const STEP_PENALTY: f64 = -0.01;

/// Deterministic 4×4 Frozen Lake with shaped rewards.
///
/// Every step costs 0.01 except the one that reaches the goal, which pays 1.
/// Falling into a hole costs an additional 0.2. The shortest path therefore
/// returns 0.95 and the quickest fall -0.22.
#[derive(Debug, Clone, PartialEq)]
pub struct FrozenLake {
    position: usize,
    steps: usize,
    done: bool,
}

impl Default for FrozenLake {
    fn default() -> Self {
        Self::new()
    }
}

impl FrozenLake {
    pub fn new() -> Self {
        Self {
            position: 0,
            steps: 0,
            done: false,
        }
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn cell(position: usize) -> u8 {
        MAP[position / 4][position % 4]
    }

    pub fn is_terminal_cell(position: usize) -> bool {
        matches!(Self::cell(position), b'H' | b'G')
    }

    /// Actions: 0 left, 1 down, 2 right, 3 up. Moves into the border leave the position unchanged.
    pub fn fl_step(&mut self, action: usize) -> Result<Transition> {
        if self.done {
            return Err(Error::Usage("step on a finished Frozen Lake episode".into()));
        }
        let (row, col) = (self.position / 4, self.position % 4);
        let (row, col) = match action {
            0 => (row, col.saturating_sub(1)),
            1 => ((row + 1).min(3), col),
            2 => (row, (col + 1).min(3)),
            3 => (row.saturating_sub(1), col),
            a => return Err(Error::Usage(format!("invalid Frozen Lake action {a}"))),
        };
        self.position = row * 4 + col;
        self.steps += 1;
        let (reward, terminal) = match Self::cell(self.position) {
            b'G' => (GOAL_REWARD, true),
            b'H' => (STEP_PENALTY + HOLE_PENALTY, true),
            _ => (STEP_PENALTY, false),
        };
        self.done = terminal || self.steps >= FL_EPISODE_CAP;
        Ok(Transition {
            obs: Observation::Discrete(self.position),
            reward,
            done: self.done,
        })
    }
}

impl Env for FrozenLake {
    fn reset(&mut self, _rng: &mut ChaCha8Rng) -> Observation {
        *self = Self::new();
        Observation::Discrete(0)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        self.fl_step(action)
    }

    fn n_actions(&self) -> usize {
        4
    }
}
