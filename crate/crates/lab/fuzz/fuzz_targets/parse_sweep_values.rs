#![no_main]

use libfuzzer_sys::fuzz_target;
use qppo_lab::sweep::parse_sweep_values;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(values) = parse_sweep_values(text) {
        assert!(!values.is_empty());
    }
});
