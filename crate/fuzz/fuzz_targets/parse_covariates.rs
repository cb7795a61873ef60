#![no_main]

use libfuzzer_sys::fuzz_target;
use somqe::pipeline::parse_covariates;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    for decimal_comma in [false, true] {
        if let Ok(set) = parse_covariates(text, decimal_comma) {
            let n = set.series[0].len();
            assert!(set.series.iter().all(|s| s.len() == n));
        }
    }
});
