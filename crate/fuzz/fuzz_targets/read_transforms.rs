#![no_main]

use libfuzzer_sys::fuzz_target;
use somqe::imaging::read_transforms;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let _ = read_transforms(text);
});
