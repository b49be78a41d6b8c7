//! Per-seed and aggregate CSV logs.
//!
//! Per-seed columns, in order: `timestep, raw_return, smoothed_return, policy_loss,
//! value_loss, entropy, lr_actor, lr_scaling, beta`. `lr_scaling` is empty without a scaling
//! group and `beta` joins per-action factors with `;` (empty without output scaling).

use std::io::{Read, Write};
use std::path::Path;

use qppo_core::ppo::UpdateRecord;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, LabError, Result};
use crate::ewma::ewma;

pub const LOG_COLUMNS: [&str; 9] = [
    "timestep",
    "raw_return",
    "smoothed_return",
    "policy_loss",
    "value_loss",
    "entropy",
    "lr_actor",
    "lr_scaling",
    "beta",
];

pub const AGGREGATE_COLUMNS: [&str; 6] = [
    "timestep",
    "seeds",
    "raw_mean",
    "raw_std",
    "smoothed_mean",
    "smoothed_std",
];

/// One per-seed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub timestep: u64,
    pub raw_return: f64,
    pub smoothed_return: f64,
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub lr_actor: f64,
    pub lr_scaling: Option<f64>,
    pub beta: Vec<f64>,
}

/// One aggregate CSV row: statistics across seeds at a timestep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub timestep: u64,
    pub seeds: usize,
    pub raw_mean: f64,
    pub raw_std: f64,
    pub smoothed_mean: f64,
    pub smoothed_std: f64,
}

/// Builds rows from training records, smoothing the raw return with `alpha`.
pub fn rows_from_records(records: &[UpdateRecord], alpha: f64) -> Result<Vec<LogRow>> {
    let raw: Vec<f64> = records.iter().map(|r| r.raw_return).collect();
    let smoothed = ewma(&raw, alpha)?;
    Ok(records
        .iter()
        .zip(smoothed)
        .map(|(r, s)| LogRow {
            timestep: r.timestep,
            raw_return: r.raw_return,
            smoothed_return: s,
            policy_loss: r.policy_loss,
            value_loss: r.value_loss,
            entropy: r.entropy,
            lr_actor: r.lr_actor,
            lr_scaling: r.lr_scaling,
            beta: r.beta.clone(),
        })
        .collect())
}

pub fn write_log<W: Write>(out: W, rows: &[LogRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| LabError::Usage(format!("writing CSV: {e}"));
    w.write_record(LOG_COLUMNS).map_err(err)?;
    for r in rows {
        let beta: Vec<String> = r.beta.iter().map(f64::to_string).collect();
        w.write_record([
            r.timestep.to_string(),
            r.raw_return.to_string(),
            r.smoothed_return.to_string(),
            r.policy_loss.to_string(),
            r.value_loss.to_string(),
            r.entropy.to_string(),
            r.lr_actor.to_string(),
            r.lr_scaling.map(|v| v.to_string()).unwrap_or_default(),
            beta.join(";"),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| LabError::Usage(format!("writing CSV: {e}")))
}

pub fn write_log_file(path: &Path, rows: &[LogRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    write_log(std::io::BufWriter::new(file), rows)
}

fn parse_f64(field: &str, column: &str, line: usize) -> std::result::Result<f64, String> {
    field
        .parse::<f64>()
        .map_err(|_| format!("line {line}: column {column}: cannot parse {field:?} as a number"))
}

/// Parses a per-seed log. Timesteps must be strictly increasing.
pub fn parse_log<R: Read>(input: R) -> std::result::Result<Vec<LogRow>, String> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    if headers.iter().ne(LOG_COLUMNS) {
        return Err(format!("unexpected header {:?}", headers.iter().collect::<Vec<_>>()));
    }
    let mut rows: Vec<LogRow> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| e.to_string())?;
        let line = i + 2;
        if rec.len() != LOG_COLUMNS.len() {
            return Err(format!(
                "line {line}: expected {} fields, got {}",
                LOG_COLUMNS.len(),
                rec.len()
            ));
        }
        let timestep = rec[0]
            .parse::<u64>()
            .map_err(|_| format!("line {line}: invalid timestep {:?}", &rec[0]))?;
        if rows.last().is_some_and(|prev| prev.timestep >= timestep) {
            return Err(format!("line {line}: timestep {timestep} does not increase"));
        }
        let num = |k: usize| parse_f64(&rec[k], LOG_COLUMNS[k], line);
        let lr_scaling = match &rec[7] {
            "" => None,
            s => Some(parse_f64(s, "lr_scaling", line)?),
        };
        let beta = match &rec[8] {
            "" => Vec::new(),
            s => s
                .split(';')
                .map(|b| parse_f64(b, "beta", line))
                .collect::<std::result::Result<_, _>>()?,
        };
        rows.push(LogRow {
            timestep,
            raw_return: num(1)?,
            smoothed_return: num(2)?,
            policy_loss: num(3)?,
            value_loss: num(4)?,
            entropy: num(5)?,
            lr_actor: num(6)?,
            lr_scaling,
            beta,
        });
    }
    Ok(rows)
}

pub fn read_log_file(path: &Path) -> Result<Vec<LogRow>> {
    let file = std::fs::File::open(path).map_err(io_err(path))?;
    parse_log(std::io::BufReader::new(file)).map_err(|message| LabError::Log {
        path: path.into(),
        message,
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Per-timestep mean and population standard deviation across seeds.
///
/// Seeds that stopped early contribute only to the timesteps they reached.
pub fn aggregate(per_seed: &[Vec<LogRow>]) -> Vec<AggregateRow> {
    let len = per_seed.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|t| {
            let rows: Vec<&LogRow> = per_seed.iter().filter_map(|s| s.get(t)).collect();
            let raw: Vec<f64> = rows.iter().map(|r| r.raw_return).collect();
            let smooth: Vec<f64> = rows.iter().map(|r| r.smoothed_return).collect();
            let (raw_mean, raw_std) = mean_std(&raw);
            let (smoothed_mean, smoothed_std) = mean_std(&smooth);
            AggregateRow {
                timestep: rows[0].timestep,
                seeds: rows.len(),
                raw_mean,
                raw_std,
                smoothed_mean,
                smoothed_std,
            }
        })
        .collect()
}

pub fn write_aggregate_file(path: &Path, rows: &[AggregateRow]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let err = |e: csv::Error| LabError::Usage(format!("writing {}: {e}", path.display()));
    for r in rows {
        w.serialize(r).map_err(err)?;
    }
    if rows.is_empty() {
        w.write_record(AGGREGATE_COLUMNS).map_err(err)?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_aggregate_file(path: &Path) -> Result<Vec<AggregateRow>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| LabError::Log {
        path: path.into(),
        message: e.to_string(),
    })?;
    reader
        .deserialize()
        .collect::<std::result::Result<Vec<AggregateRow>, _>>()
        .map_err(|e| LabError::Log {
            path: path.into(),
            message: e.to_string(),
        })
}
