use rayon::prelude::*;

use super::train::best_matching_unit;
use super::{PixelVector, SomError, SomGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct QeResult {
    /// Mean pixel-to-BMU Euclidean distance.
    pub qe: f64,
    pub pixel_count: usize,
    /// Pixels won by each model, row-major.
    pub assignment_counts: Vec<usize>,
}

impl QeResult {
    pub fn empty_models(&self) -> usize {
        empty_model_count(self)
    }
}

/// Number of models that attracted no pixel.
pub fn empty_model_count(result: &QeResult) -> usize {
    result.assignment_counts.iter().filter(|&&c| c == 0).count()
}

/// Scores `pixels` against a trained map. BMU search runs in parallel; the
/// distances are then reduced with [`pairwise_sum`] in row-major order, so the
/// result does not depend on the thread count.
pub fn quantization_error(pixels: &[PixelVector], grid: &SomGrid) -> Result<QeResult, SomError> {
    if pixels.is_empty() {
        return Err(SomError::EmptyImage);
    }
    let matches: Vec<(usize, f64)> = pixels
        .par_iter()
        .with_min_len(4096)
        .map(|x| best_matching_unit(x, grid))
        .collect();
    let mut counts = vec![0; grid.len()];
    let distances: Vec<f64> = matches
        .iter()
        .map(|&(i, d)| {
            counts[i] += 1;
            d
        })
        .collect();
    Ok(QeResult {
        qe: pairwise_sum(&distances) / pixels.len() as f64,
        pixel_count: pixels.len(),
        assignment_counts: counts,
    })
}

/// Recursive pairwise summation: split at `len / 2` until at most 8 values
/// remain, which are added left to right.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        values.iter().fold(0.0, |acc, v| acc + v)
    } else {
        let (l, r) = values.split_at(values.len() / 2);
        pairwise_sum(l) + pairwise_sum(r)
    }
}
