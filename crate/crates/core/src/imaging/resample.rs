use super::raster::{Plane, RasterImage};
use super::transform::RegistrationTransform;

/// Warps each channel by `transform` with bilinear, clamp-to-edge sampling:
/// `out(p) = in(T^-1(p))`.
pub fn resample(image: &RasterImage, transform: &RegistrationTransform) -> RasterImage {
    if transform.is_identity() {
        return image.clone();
    }
    let planes = [0, 1, 2].map(|c| resample_plane(&image.channel(c), transform));
    RasterImage::from_channels(planes).expect("bilinear interpolation stays in range")
}

pub fn resample_plane(plane: &Plane, transform: &RegistrationTransform) -> Plane {
    let inv = transform.inverse();
    let center = RegistrationTransform::center(plane.width, plane.height);
    let mut data = Vec::with_capacity(plane.data.len());
    for y in 0..plane.height {
        for x in 0..plane.width {
            let (sx, sy) = inv.apply(x as f64, y as f64, center);
            data.push(plane.sample(sx, sy));
        }
    }
    Plane::new(plane.width, plane.height, data)
}
