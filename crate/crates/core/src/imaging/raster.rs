use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RasterError {
    #[error("image dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} samples for the given dimensions, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("sample {index} is {value}, outside [0,255]")]
    OutOfRange { index: usize, value: f64 },
}

/// Interleaved RGB image with real-valued samples in `[0,255]`.
///
/// Images decoded from 8-bit files carry integral samples; resampling may
/// introduce fractional values until the image is normalized or saved.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl RasterImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::ZeroDimension { width, height });
        }
        let expected = width * height * 3;
        if data.len() != expected {
            return Err(RasterError::LengthMismatch {
                expected,
                actual: data.len(),
            });
        }
        if let Some((index, &value)) = data.iter().enumerate().find(|(_, v)| !(0.0..=255.0).contains(*v)) {
            return Err(RasterError::OutOfRange { index, value });
        }
        Ok(Self { width, height, data })
    }

    pub fn from_rgb8(width: usize, height: usize, bytes: &[u8]) -> Result<Self, RasterError> {
        Self::new(width, height, bytes.iter().map(|&b| f64::from(b)).collect())
    }

    /// Image filled with a single color.
    pub fn filled(width: usize, height: usize, rgb: [f64; 3]) -> Result<Self, RasterError> {
        let data = (0..width * height).flat_map(|_| rgb).collect();
        Self::new(width, height, data)
    }

    /// Builds an image from a per-pixel closure `f(x, y) -> [r, g, b]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f64; 3],
    ) -> Result<Self, RasterError> {
        let mut data = Vec::with_capacity(width * height * 3);
        for y in 0..height {
            for x in 0..width {
                data.extend(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    /// Pixels in row-major order.
    pub fn pixels(&self) -> impl ExactSizeIterator<Item = [f64; 3]> + '_ {
        self.data.chunks_exact(3).map(|c| [c[0], c[1], c[2]])
    }

    /// Samples rounded half-up and clamped to 8 bits.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data.iter().map(|&v| to_u8(v)).collect()
    }

    pub fn channel(&self, c: usize) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self.data.iter().skip(c).step_by(3).copied().collect(),
        }
    }

    pub fn from_channels(planes: [Plane; 3]) -> Result<Self, RasterError> {
        let [r, g, b] = planes;
        let data = r
            .data
            .iter()
            .zip(&g.data)
            .zip(&b.data)
            .flat_map(|((&r, &g), &b)| [r, g, b])
            .collect();
        Self::new(r.width, r.height, data)
    }

    /// Luminance plane `0.299 R + 0.587 G + 0.114 B`.
    pub fn luminance(&self) -> Plane {
        Plane {
            width: self.width,
            height: self.height,
            data: self
                .pixels()
                .map(|[r, g, b]| 0.299 * r + 0.587 * g + 0.114 * b)
                .collect(),
        }
    }
}

pub(crate) fn to_u8(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

/// Single-channel real-valued image, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), width * height, "plane size mismatch");
        Self { width, height, data }
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    /// Bilinear sample with clamp-to-edge addressing.
    pub fn sample(&self, x: f64, y: f64) -> f64 {
        let xmax = (self.width - 1) as f64;
        let ymax = (self.height - 1) as f64;
        let x = x.clamp(0.0, xmax);
        let y = y.clamp(0.0, ymax);
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let x0 = x0 as usize;
        let y0 = y0 as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        // Integral coordinates must reproduce the stored sample exactly.
        let top = if fx == 0.0 {
            self.at(x0, y0)
        } else {
            self.at(x0, y0) * (1.0 - fx) + self.at(x1, y0) * fx
        };
        if fy == 0.0 {
            return top;
        }
        let bottom = if fx == 0.0 {
            self.at(x0, y1)
        } else {
            self.at(x0, y1) * (1.0 - fx) + self.at(x1, y1) * fx
        };
        top * (1.0 - fy) + bottom * fy
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }
}
