#![no_main]

use libfuzzer_sys::fuzz_target;
use qppo_lab::log_csv::{parse_log, write_log};

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = parse_log(data) else { return };
    let mut out = Vec::new();
    write_log(&mut out, &rows).expect("parsed rows serialize");
    let again = parse_log(out.as_slice()).expect("serialized rows parse");
    assert_eq!(again.len(), rows.len());
});
