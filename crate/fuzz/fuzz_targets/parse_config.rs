#![no_main]

use libfuzzer_sys::fuzz_target;
use plate_core::config::{parse_config, ProblemConfig};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = parse_config(text) {
        // Anything that parses must survive a round trip unchanged.
        let again = serde_json::to_string(&cfg).unwrap();
        let back: ProblemConfig = parse_config(&again).unwrap();
        assert_eq!(back, cfg);
    }
});
