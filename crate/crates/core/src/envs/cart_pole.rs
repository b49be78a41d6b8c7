use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::{Env, Observation, Transition};

pub const GRAVITY: f64 = 9.8;
pub const CART_MASS: f64 = 1.0;
pub const POLE_MASS: f64 = 0.1;
/// Half the pole length.
pub const POLE_HALF_LENGTH: f64 = 0.5;
pub const FORCE: f64 = 10.0;
pub const TAU: f64 = 0.02;
pub const X_LIMIT: f64 = 2.4;
pub const ANGLE_LIMIT: f64 = 12.0 * 2.0 * std::f64::consts::PI / 360.0;
pub const MAX_STEPS: usize = 500;

/// Classic cart-pole balancing task, Euler-integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct CartPole {
    pub state: [f64; 4],
    steps: usize,
    done: bool,
}

impl Default for CartPole {
    fn default() -> Self {
        Self::new()
    }
}

impl CartPole {
    pub fn new() -> Self {
        Self {
            state: [0.0; 4],
            steps: 0,
            done: false,
        }
    }

    pub fn from_state(state: [f64; 4]) -> Self {
        Self {
            state,
            steps: 0,
            done: false,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Cart and pole accelerations for a horizontal force.
    pub fn accelerations(state: [f64; 4], force: f64) -> (f64, f64) {
        let [_, _, theta, theta_dot] = state;
        let total_mass = CART_MASS + POLE_MASS;
        let polemass_length = POLE_MASS * POLE_HALF_LENGTH;
        let (sin, cos) = theta.sin_cos();
        let temp = (force + polemass_length * theta_dot * theta_dot * sin) / total_mass;
        let theta_acc =
            (GRAVITY * sin - cos * temp) / (POLE_HALF_LENGTH * (4.0 / 3.0 - POLE_MASS * cos * cos / total_mass));
        let x_acc = temp - polemass_length * theta_acc * cos / total_mass;
        (x_acc, theta_acc)
    }

    /// Action 0 pushes left, 1 pushes right.
    pub fn cp_step(&mut self, action: usize) -> Result<Transition> {
        if self.done {
            return Err(Error::Usage("step on a finished Cart Pole episode".into()));
        }
        let force = match action {
            0 => -FORCE,
            1 => FORCE,
            a => return Err(Error::Usage(format!("invalid Cart Pole action {a}"))),
        };
        let (x_acc, theta_acc) = Self::accelerations(self.state, force);
        let [x, x_dot, theta, theta_dot] = self.state;
        self.state = [
            x + TAU * x_dot,
            x_dot + TAU * x_acc,
            theta + TAU * theta_dot,
            theta_dot + TAU * theta_acc,
        ];
        self.steps += 1;
        let fell = self.state[0].abs() > X_LIMIT || self.state[2].abs() > ANGLE_LIMIT;
        self.done = fell || self.steps >= MAX_STEPS;
        Ok(Transition {
            obs: Observation::Continuous(self.state),
            reward: 1.0,
            done: self.done,
        })
    }
}

impl Env for CartPole {
    fn reset(&mut self, rng: &mut ChaCha8Rng) -> Observation {
        let state = std::array::from_fn(|_| rng.random_range(-0.05..=0.05));
        *self = Self::from_state(state);
        Observation::Continuous(state)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        self.cp_step(action)
    }

    fn n_actions(&self) -> usize {
        2
    }
}
