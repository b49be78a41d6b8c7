#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use qppo_lab::config::ExperimentConfig;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(config) = ExperimentConfig::from_toml_str(text) else {
        return;
    };
    if let Ok(exp) = config.resolve(Path::new("/fuzz-runs")) {
        let echo = exp.echo_toml().expect("resolved config echoes");
        let again = ExperimentConfig::from_toml_str(&echo).expect("echo parses");
        assert_eq!(again.resolve(Path::new("/fuzz-runs")).expect("echo resolves"), exp);
    }
});
