//! Replays the checked-in fuzz corpus through the parser entry points.

use std::fs;
use std::path::{Path, PathBuf};

use qppo_lab::config::ExperimentConfig;
use qppo_lab::log_csv::{parse_log, write_log};
use qppo_lab::sweep::parse_sweep_values;

fn corpus(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fuzz/corpus").join(target);
    let mut files: Vec<_> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| {
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    files.sort();
    assert!(!files.is_empty(), "empty corpus {}", dir.display());
    files
}

#[test]
fn config_corpus() {
    let mut resolved = 0;
    for (path, bytes) in corpus("parse_config") {
        let text = std::str::from_utf8(&bytes).unwrap();
        let Ok(config) = ExperimentConfig::from_toml_str(text) else {
            continue;
        };
        if let Ok(exp) = config.resolve(Path::new("/fuzz-runs")) {
            let echo = exp.echo_toml().unwrap();
            let again = ExperimentConfig::from_toml_str(&echo).unwrap();
            assert_eq!(
                again.resolve(Path::new("/fuzz-runs")).unwrap(),
                exp,
                "{}",
                path.display()
            );
            resolved += 1;
        }
    }
    assert!(resolved >= 3);
}

#[test]
fn log_corpus() {
    let mut parsed = 0;
    for (path, bytes) in corpus("parse_log_csv") {
        let Ok(rows) = parse_log(bytes.as_slice()) else {
            continue;
        };
        let mut out = Vec::new();
        write_log(&mut out, &rows).unwrap();
        assert_eq!(parse_log(out.as_slice()).unwrap(), rows, "{}", path.display());
        parsed += 1;
    }
    assert!(parsed >= 2);
}

#[test]
fn sweep_corpus() {
    for (path, bytes) in corpus("parse_sweep_values") {
        let values = parse_sweep_values(std::str::from_utf8(&bytes).unwrap().trim()).unwrap();
        assert!(!values.is_empty(), "{}", path.display());
    }
}
