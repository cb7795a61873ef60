#![no_main]

use libfuzzer_sys::fuzz_target;
use somqe::pipeline::{parse_config, parse_grid_dims};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(config) = parse_config(text) {
        assert!(config.som.validate().is_ok());
    }
    let _ = parse_grid_dims(text);
});
