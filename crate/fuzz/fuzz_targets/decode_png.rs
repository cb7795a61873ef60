#![no_main]

use libfuzzer_sys::fuzz_target;
use somqe::imaging::decode_png;

fuzz_target!(|data: &[u8]| {
    if let Ok(img) = decode_png(data) {
        assert_eq!(img.to_rgb8().len(), img.width() * img.height() * 3);
    }
});
