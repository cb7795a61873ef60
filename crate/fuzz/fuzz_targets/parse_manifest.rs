#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;
use somqe::pipeline::parse_manifest;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_manifest(text, Path::new("base"), "roi") {
        assert!(!m.entries.is_empty());
    }
});
