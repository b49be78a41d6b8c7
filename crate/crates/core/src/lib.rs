//! Variational-quantum-circuit actors trained with proximal policy optimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`qsim`]: exact statevector simulation of small registers.
//! - [`circuits`]: the three re-uploading actor architectures, encodings and policy heads.
//! - [`autograd`]: parameter-shift and adjoint gradients through the circuit and policy head,
//!   plus reverse-mode gradients for the classical networks.
//! - [`nn`]: small tanh MLPs, initializers, Adam and global-norm clipping.
//! - [`envs`]: deterministic Frozen Lake, Cart Pole and a synchronous vector wrapper.
//! - [`ppo`]: rollouts, GAE, the clipped losses, learning-rate schedules and the training loop.

pub mod autograd;
pub mod circuits;
pub mod envs;
mod error;
pub mod nn;
pub mod ppo;
pub mod qsim;

pub use error::{Error, Result};
