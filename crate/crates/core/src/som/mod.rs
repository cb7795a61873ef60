//! Self-organizing map over normalized RGB pixel vectors.
//!
//! A map is trained on one image by sequential winner-take-all learning with a
//! bubble neighborhood, then every image of a series is scored by its
//! quantization error (QE): the mean Euclidean distance from each pixel to its
//! best-matching model.

mod grid_io;
mod qe;
mod search;
mod train;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::imaging::RasterImage;

pub use grid_io::{format_grid, load_grid, parse_grid, save_grid, GridFormatError, GRID_MAGIC};
pub use qe::{empty_model_count, pairwise_sum, quantization_error, QeResult};
pub use search::{map_size_search, MapSizeReport, MapSizeTrial};
pub use train::{best_matching_unit, initialize_grid, train, train_step};

#[derive(Debug, Error, PartialEq)]
pub enum SomError {
    #[error("empty training image")]
    EmptyImage,
    #[error("grid dimensions must be positive, got {width}x{height}")]
    InvalidDimensions { width: usize, height: usize },
    #[error("pixel component {value} is not a finite value in [0,1]")]
    ComponentOutOfRange { value: f64 },
    #[error("expected {expected} models, got {actual}")]
    ModelCountMismatch { expected: usize, actual: usize },
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
    #[error("no candidate map sizes given")]
    NoCandidates,
}

/// One RGB sample scaled to `[0,1]` per component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelVector([f64; 3]);

impl PixelVector {
    pub fn new(components: [f64; 3]) -> Result<Self, SomError> {
        match components.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            Some(&value) => Err(SomError::ComponentOutOfRange { value }),
            None => Ok(Self(components)),
        }
    }

    /// Scales an 8-bit-range sample by 1/255.
    pub fn from_rgb255(rgb: [f64; 3]) -> Self {
        Self(rgb.map(|v| (v / 255.0).clamp(0.0, 1.0)))
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn squared_distance(&self, other: &Self) -> f64 {
        let [a, b, c] = self.0;
        let [x, y, z] = other.0;
        (a - x) * (a - x) + (b - y) * (b - y) + (c - z) * (c - z)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.squared_distance(other).sqrt()
    }
}

/// Pixel vectors of an image in row-major order.
pub fn pixel_vectors(image: &RasterImage) -> Vec<PixelVector> {
    image.pixels().map(PixelVector::from_rgb255).collect()
}

/// Rectangular map of model vectors, row-major: model `i` sits at
/// `(row, col) = (i / width, i % width)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SomGrid {
    width: usize,
    height: usize,
    models: Vec<PixelVector>,
}

impl SomGrid {
    pub fn new(width: usize, height: usize, models: Vec<PixelVector>) -> Result<Self, SomError> {
        if width == 0 || height == 0 {
            return Err(SomError::InvalidDimensions { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(SomError::InvalidDimensions { width, height })?;
        if models.len() != expected {
            return Err(SomError::ModelCountMismatch {
                expected,
                actual: models.len(),
            });
        }
        Ok(Self { width, height, models })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn models(&self) -> &[PixelVector] {
        &self.models
    }

    pub(crate) fn models_mut(&mut self) -> &mut [PixelVector] {
        &mut self.models
    }

    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index / self.width, index % self.width)
    }

    /// Euclidean distance between two models' grid positions.
    pub fn grid_distance(&self, a: usize, b: usize) -> f64 {
        let (ra, ca) = self.coords(a);
        let (rb, cb) = self.coords(b);
        let dr = ra.abs_diff(rb) as f64;
        let dc = ca.abs_diff(cb) as f64;
        (dr * dr + dc * dc).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayMode {
    #[default]
    Constant,
    /// `alpha(t) = alpha0 (1 - t/T)`, `radius(t) = r0 (1 - t/T)`.
    LinearToZero,
}

impl fmt::Display for DecayMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayMode::Constant => "constant",
            DecayMode::LinearToZero => "linear",
        })
    }
}

impl FromStr for DecayMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constant" => Ok(DecayMode::Constant),
            "linear" | "linear-to-zero" => Ok(DecayMode::LinearToZero),
            other => Err(format!("unknown decay mode '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingParams {
    pub learning_rate: f64,
    /// Bubble-kernel cutoff in grid units.
    pub neighborhood_radius: f64,
    /// Number of single-pixel presentations.
    pub iterations: usize,
    pub seed: u64,
    pub decay: DecayMode,
}

impl Default for TrainingParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.2,
            neighborhood_radius: 1.2,
            iterations: 1000,
            seed: 0,
            decay: DecayMode::Constant,
        }
    }
}

impl TrainingParams {
    /// A learning rate of exactly 0 is accepted and leaves the map untouched.
    pub fn validate(&self) -> Result<(), SomError> {
        if !(0.0..=1.0).contains(&self.learning_rate) {
            return Err(SomError::InvalidParams(format!(
                "learning rate {} outside (0,1]",
                self.learning_rate
            )));
        }
        if !(self.neighborhood_radius.is_finite() && self.neighborhood_radius >= 0.0) {
            return Err(SomError::InvalidParams(format!(
                "neighborhood radius {} must be non-negative",
                self.neighborhood_radius
            )));
        }
        if self.iterations == 0 {
            return Err(SomError::InvalidParams("iterations must be at least 1".to_owned()));
        }
        Ok(())
    }

    /// Learning rate and radius at iteration `t` (0-based).
    pub fn schedule(&self, t: usize) -> (f64, f64) {
        match self.decay {
            DecayMode::Constant => (self.learning_rate, self.neighborhood_radius),
            DecayMode::LinearToZero => {
                let f = 1.0 - t as f64 / self.iterations as f64;
                (self.learning_rate * f, self.neighborhood_radius * f)
            }
        }
    }
}
