use super::raster::{to_u8, RasterImage};

/// Per-channel contrast stretch `(I - min) / (max - min) * 255`, rounded
/// half-up to 8-bit levels. A constant channel maps to 0.
pub fn normalize_contrast(image: &RasterImage) -> RasterImage {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for px in image.pixels() {
        for c in 0..3 {
            lo[c] = lo[c].min(px[c]);
            hi[c] = hi[c].max(px[c]);
        }
    }
    let data = image
        .data()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let c = i % 3;
            let span = hi[c] - lo[c];
            if span > 0.0 {
                f64::from(to_u8((v - lo[c]) / span * 255.0))
            } else {
                0.0
            }
        })
        .collect();
    RasterImage::new(image.width(), image.height(), data).expect("normalized samples are in range")
}
