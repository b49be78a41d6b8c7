//! One-parameter sweeps over an experiment config.

use std::path::{Path, PathBuf};

use crate::compare::compare;
use crate::config::ExperimentConfig;
use crate::error::{io_err, LabError, Result};
use crate::ewma::ALPHA_SWEEP;
use crate::runner::{run_experiment, RunOutcome};

/// Splits a comma-separated list at top level and parses each item as a TOML value.
///
/// Items may be numbers, booleans, quoted strings, arrays or inline tables; a bare word such as
/// `global` is taken as a string.
pub fn parse_sweep_values(list: &str) -> Result<Vec<toml::Value>> {
    let mut items = Vec::new();
    let (mut depth, mut quote, mut start) = (0i32, None::<char>, 0usize);
    for (i, ch) in list.char_indices() {
        match (quote, ch) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), _) => {}
            (None, '"' | '\'') => quote = Some(ch),
            (None, '[' | '{') => depth += 1,
            (None, ']' | '}') => depth -= 1,
            (None, ',') if depth == 0 => {
                items.push(&list[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(LabError::Usage(format!("unbalanced brackets in sweep values {list:?}")));
        }
    }
    if depth != 0 || quote.is_some() {
        return Err(LabError::Usage(format!("unterminated sweep values {list:?}")));
    }
    items.push(&list[start..]);
    items.into_iter().map(|item| parse_value(item.trim())).collect()
}

fn parse_value(item: &str) -> Result<toml::Value> {
    if item.is_empty() {
        return Err(LabError::Usage("empty sweep value".into()));
    }
    if item.contains(['\n', '\r']) {
        return Err(LabError::Usage(format!("sweep value {item:?} spans lines")));
    }
    if let Ok(mut table) = toml::from_str::<toml::Table>(&format!("v = {item}")) {
        if table.len() == 1 {
            if let Some(v) = table.remove("v") {
                return Ok(v);
            }
        }
    }
    if item
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Ok(toml::Value::String(item.to_string()));
    }
    Err(LabError::Usage(format!("cannot parse sweep value {item:?}")))
}

/// Sets `value` at a dotted key path, creating intermediate tables.
pub fn set_dotted(table: &mut toml::Table, path: &str, value: toml::Value) -> Result<()> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(LabError::Usage(format!("invalid parameter name {path:?}")));
    }
    if matches!(keys[0], "name" | "output_dir") {
        return Err(LabError::Usage(format!("{path} cannot be swept")));
    }
    let (last, parents) = keys.split_last().expect("non-empty");
    let mut cur = table;
    for k in parents {
        let entry = cur
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| LabError::Usage(format!("{path}: {k} is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

fn value_tag(v: &toml::Value) -> String {
    let raw = match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    raw.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub runs: Vec<RunOutcome>,
    pub comparison_dir: PathBuf,
}

/// Runs the base config once per value of `param`, then compares all variants.
/// Variants default to the sweep smoothing factor unless the config sets one.
pub fn sweep(config_path: &Path, param: &str, values: &[toml::Value], output_root: &Path) -> Result<SweepOutcome> {
    let text = std::fs::read_to_string(config_path).map_err(io_err(config_path))?;
    let base: toml::Table = toml::from_str(&text).map_err(|e| LabError::Config(e.to_string()))?;
    let base_cfg = ExperimentConfig::from_toml_str(&text)?;
    let base_dir = base_cfg.resolve(output_root)?.output_dir;
    if values.is_empty() {
        return Err(LabError::Usage("no sweep values".into()));
    }

    let mut runs = Vec::new();
    for v in values {
        let mut table = base.clone();
        set_dotted(&mut table, param, v.clone())?;
        let mut cfg: ExperimentConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| LabError::Config(format!("{param} = {v}: {e}")))?;
        let tag = format!("{}={}", param.rsplit('.').next().unwrap_or(param), value_tag(v));
        cfg.name = format!("{}-{tag}", base_cfg.name);
        cfg.output_dir = Some(base_dir.join(&tag));
        cfg.smoothing_alpha = cfg.smoothing_alpha.or(Some(ALPHA_SWEEP));
        let exp = cfg.resolve(output_root)?;
        runs.push(run_experiment(&exp)?);
    }
    let comparison_dir = base_dir.join("comparison");
    let dirs: Vec<PathBuf> = runs.iter().map(|r| r.dir.clone()).collect();
    if dirs.len() >= 2 {
        compare(&dirs, &comparison_dir)?;
    }
    Ok(SweepOutcome { runs, comparison_dir })
}
