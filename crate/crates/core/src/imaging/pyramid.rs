use super::raster::{Plane, RasterImage};

/// Coarsest level keeps its smaller side at or above this many pixels.
pub const MIN_COARSE_DIM: usize = 32;

/// Resolution pyramid; `levels[0]` is full resolution.
#[derive(Debug, Clone)]
pub struct Pyramid {
    pub levels: Vec<RasterImage>,
}

pub fn build_pyramid(image: &RasterImage) -> Pyramid {
    let mut levels = vec![image.clone()];
    loop {
        let last = levels.last().unwrap();
        if !can_halve(last.width(), last.height()) {
            break;
        }
        let halved = [0, 1, 2].map(|c| downsample(&last.channel(c)));
        levels.push(RasterImage::from_channels(halved).expect("box filter preserves range"));
    }
    Pyramid { levels }
}

pub(crate) fn plane_pyramid(plane: &Plane) -> Vec<Plane> {
    let mut levels = vec![plane.clone()];
    while let Some(last) = levels.last() {
        if !can_halve(last.width, last.height) {
            break;
        }
        let next = downsample(last);
        levels.push(next);
    }
    levels
}

fn can_halve(width: usize, height: usize) -> bool {
    width.min(height) / 2 >= MIN_COARSE_DIM
}

/// 2x2 box filter; an odd trailing row or column is dropped.
fn downsample(src: &Plane) -> Plane {
    let (w, h) = (src.width / 2, src.height / 2);
    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = (2 * x, 2 * y);
            let sum = src.at(sx, sy) + src.at(sx + 1, sy) + src.at(sx, sy + 1) + src.at(sx + 1, sy + 1);
            data.push(sum / 4.0);
        }
    }
    Plane::new(w, h, data)
}
