#![no_main]

use libfuzzer_sys::fuzz_target;
use somqe::imaging::{decode_ppm, encode_ppm};

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_ppm(data) {
        let again = decode_ppm(&encode_ppm(&img)).expect("re-encoded image decodes");
        assert_eq!(img, again);
    }
});
