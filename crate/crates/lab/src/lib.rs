//! Experiment tooling around `qppo-core`: TOML configs, seeded runs, CSV logs, EWMA smoothing,
//! SVG learning curves, run comparison and parameter sweeps.

pub mod compare;
pub mod config;
mod error;
pub mod ewma;
pub mod log_csv;
pub mod plot;
pub mod runner;
pub mod sweep;

pub use error::{LabError, Result};

/// Environment variable naming the directory that relative output paths resolve against.
pub const OUTPUT_ROOT_VAR: &str = "QPPO_OUTPUT_ROOT";
pub const DEFAULT_OUTPUT_ROOT: &str = "runs";
