#![no_main]

use libfuzzer_sys::fuzz_target;
use plate_core::config::{parse_sweep_axis, parse_sweep_values};

// First line is the parameter name, the rest the value list.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (param, values) = text.split_once('\n').unwrap_or((text, ""));
    if let Ok((axis, unit)) = parse_sweep_axis(param) {
        let _ = parse_sweep_values(axis, unit, values);
    }
});
