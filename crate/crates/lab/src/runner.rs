//! Runs every seed of an experiment and writes its artifacts.
//!
//! Layout of a run directory:
//! `config.toml` (resolved echo), `run.toml` (manifest), `seed_<n>.csv`, `aggregate.csv`,
//! `learning_curve.svg`.

use std::path::{Path, PathBuf};

use qppo_core::envs::EnvKind;
use qppo_core::ppo::train;
use serde::{Deserialize, Serialize};

use crate::config::Experiment;
use crate::error::{io_err, LabError, Result};
use crate::log_csv::{aggregate, rows_from_records, write_aggregate_file, write_log_file, LogRow};
use crate::plot::{plot_curves, Curve};

pub const CONFIG_FILE: &str = "config.toml";
pub const MANIFEST_FILE: &str = "run.toml";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const PLOT_FILE: &str = "learning_curve.svg";

pub fn seed_file(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedStatus {
    Completed,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub seed: u64,
    pub status: SeedStatus,
    pub updates: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Summary of a run directory, read back by `compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub environment: EnvKind,
    pub actor_params: usize,
    pub total_timesteps: u64,
    pub smoothing_alpha: f64,
    pub initial_lr_actor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_lr_scaling: Option<f64>,
    pub initial_beta: Vec<f64>,
    pub seeds: Vec<SeedEntry>,
}

impl RunManifest {
    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
        toml::from_str(&text).map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    pub fn completed(&self) -> usize {
        self.seeds.iter().filter(|s| s.status == SeedStatus::Completed).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub manifest: RunManifest,
    pub per_seed: Vec<Vec<LogRow>>,
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(io_err(path))
}

/// Trains every seed in order. A seed that fails keeps its partial log and the remaining
/// seeds still run; the run errors only when no seed completes.
pub fn run_experiment(exp: &Experiment) -> Result<RunOutcome> {
    let dir = exp.output_dir.clone();
    std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    write_text(&dir.join(CONFIG_FILE), &exp.echo_toml()?)?;

    let mut entries = Vec::new();
    let mut per_seed = Vec::new();
    let mut initial = None;
    for &seed in &exp.seeds {
        log::info!("{}: seed {seed} started ({} timesteps)", exp.name, exp.total_timesteps);
        let (log, entry) = match train(&exp.train_config(seed)) {
            Ok(log) => {
                let n = log.records.len();
                (
                    Some(log),
                    SeedEntry {
                        seed,
                        status: SeedStatus::Completed,
                        updates: n,
                        error: None,
                    },
                )
            }
            Err(failure) => {
                log::warn!("{}: seed {seed} failed: {failure}", exp.name);
                let error = Some(failure.error.to_string());
                let log = failure.partial.map(|b| *b);
                let updates = log.as_ref().map_or(0, |l| l.records.len());
                (
                    log,
                    SeedEntry {
                        seed,
                        status: SeedStatus::Failed,
                        updates,
                        error,
                    },
                )
            }
        };
        let rows = match &log {
            Some(l) => rows_from_records(&l.records, exp.smoothing_alpha)?,
            None => Vec::new(),
        };
        if initial.is_none() {
            initial = log.map(|l| l.initial);
        }
        write_log_file(&dir.join(seed_file(seed)), &rows)?;
        if let Some(last) = rows.last() {
            log::info!(
                "{}: seed {seed} finished, smoothed return {}",
                exp.name,
                last.smoothed_return
            );
        }
        entries.push(entry);
        per_seed.push(rows);
    }

    let initial = initial.ok_or_else(|| LabError::Usage(format!("{}: no seed produced a log", exp.name)))?;
    let manifest = RunManifest {
        name: exp.name.clone(),
        environment: exp.env,
        actor_params: exp.actor_params(),
        total_timesteps: exp.total_timesteps,
        smoothing_alpha: exp.smoothing_alpha,
        initial_lr_actor: initial.lr_actor,
        initial_lr_scaling: initial.lr_scaling,
        initial_beta: initial.beta,
        seeds: entries,
    };
    let manifest_text = toml::to_string(&manifest).map_err(|e| LabError::Config(e.to_string()))?;
    write_text(&dir.join(MANIFEST_FILE), &manifest_text)?;

    let agg = aggregate(&per_seed);
    write_aggregate_file(&dir.join(AGGREGATE_FILE), &agg)?;
    let curve = Curve {
        label: format!("{} ({})", exp.name, manifest.actor_params),
        timesteps: agg.iter().map(|r| r.timestep).collect(),
        mean: agg.iter().map(|r| r.smoothed_mean).collect(),
        std: agg.iter().map(|r| r.smoothed_std).collect(),
    };
    plot_curves(&dir.join(PLOT_FILE), &exp.name, "smoothed return", &[curve])?;

    if manifest.completed() == 0 {
        return Err(LabError::Usage(format!(
            "{}: all {} seeds failed, see {}",
            exp.name,
            exp.seeds.len(),
            dir.join(MANIFEST_FILE).display()
        )));
    }
    Ok(RunOutcome {
        dir,
        manifest,
        per_seed,
    })
}
