//! Small classical networks and their optimisation machinery.

mod adam;
mod init;
mod mlp;

pub use adam::{clip_grad_norm, Adam, ADAM_EPS};
pub use init::{init_params, orthogonal, InitStrategy};
pub use mlp::{Mlp, MlpCache};
