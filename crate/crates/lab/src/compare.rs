//! Overlays finished runs and tabulates their results.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{io_err, LabError, Result};
use crate::log_csv::read_aggregate_file;
use crate::plot::{plot_curves, Curve};
use crate::runner::{RunManifest, AGGREGATE_FILE};

pub const SUMMARY_FILE: &str = "summary.csv";
pub const COMPARISON_PLOT: &str = "comparison.svg";

/// One line of `summary.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub label: String,
    pub environment: String,
    pub actor_params: usize,
    pub seeds_completed: usize,
    pub final_timestep: u64,
    pub final_mean: f64,
    pub final_std: f64,
    /// Mean of the smoothed mean curve over all updates: area under the curve per update.
    pub auc: f64,
}

/// Legend label: run name with the actor parameter count in parentheses.
pub fn legend_label(name: &str, actor_params: usize) -> String {
    format!("{name} ({actor_params})")
}

/// Reads each run directory, writes `summary.csv` and `comparison.svg` into `out_dir`.
pub fn compare(run_dirs: &[PathBuf], out_dir: &Path) -> Result<Vec<SummaryRow>> {
    if run_dirs.len() < 2 {
        return Err(LabError::Usage(format!(
            "compare needs at least 2 runs, got {}",
            run_dirs.len()
        )));
    }
    let mut manifests = Vec::new();
    for dir in run_dirs {
        manifests.push(RunManifest::read(dir)?);
    }
    let env = manifests[0].environment;
    if let Some((dir, m)) = run_dirs.iter().zip(&manifests).find(|(_, m)| m.environment != env) {
        return Err(LabError::Usage(format!(
            "cannot compare {:?} run {} with {:?} run {}",
            m.environment,
            dir.display(),
            env,
            run_dirs[0].display()
        )));
    }

    let mut curves = Vec::new();
    let mut summary = Vec::new();
    for (dir, m) in run_dirs.iter().zip(&manifests) {
        let agg = read_aggregate_file(&dir.join(AGGREGATE_FILE))?;
        let label = legend_label(&m.name, m.actor_params);
        let last = agg.last();
        summary.push(SummaryRow {
            label: label.clone(),
            environment: format!("{env:?}"),
            actor_params: m.actor_params,
            seeds_completed: m.completed(),
            final_timestep: last.map_or(0, |r| r.timestep),
            final_mean: last.map_or(f64::NAN, |r| r.smoothed_mean),
            final_std: last.map_or(f64::NAN, |r| r.smoothed_std),
            auc: if agg.is_empty() {
                f64::NAN
            } else {
                agg.iter().map(|r| r.smoothed_mean).sum::<f64>() / agg.len() as f64
            },
        });
        curves.push(Curve {
            label,
            timesteps: agg.iter().map(|r| r.timestep).collect(),
            mean: agg.iter().map(|r| r.smoothed_mean).collect(),
            std: agg.iter().map(|r| r.smoothed_std).collect(),
        });
    }

    std::fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let path = out_dir.join(SUMMARY_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| LabError::Usage(format!("{}: {e}", path.display())))?;
    for row in &summary {
        w.serialize(row)
            .map_err(|e| LabError::Usage(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(io_err(&path))?;
    plot_curves(
        &out_dir.join(COMPARISON_PLOT),
        &format!("{env:?}"),
        "smoothed return",
        &curves,
    )?;
    Ok(summary)
}
