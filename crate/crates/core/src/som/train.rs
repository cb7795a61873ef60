use super::{PixelVector, SomError, SomGrid, TrainingParams};
use crate::rng::SplitMix64;

/// Draws `width * height` models uniformly with replacement from `pixels`
/// using the initialization stream of `seed`.
pub fn initialize_grid(pixels: &[PixelVector], width: usize, height: usize, seed: u64) -> Result<SomGrid, SomError> {
    if pixels.is_empty() {
        return Err(SomError::EmptyImage);
    }
    if width == 0 || height == 0 {
        return Err(SomError::InvalidDimensions { width, height });
    }
    let mut rng = SplitMix64::init_stream(seed);
    let models = (0..width * height)
        .map(|_| pixels[rng.next_index(pixels.len())])
        .collect();
    SomGrid::new(width, height, models)
}

/// Row-major index of the model closest to `x`, and that distance. Ties go
/// to the lowest index.
pub fn best_matching_unit(x: &PixelVector, grid: &SomGrid) -> (usize, f64) {
    let mut best = 0;
    let mut best_d2 = f64::INFINITY;
    for (i, m) in grid.models().iter().enumerate() {
        let d2 = x.squared_distance(m);
        if d2 < best_d2 {
            best = i;
            best_d2 = d2;
        }
    }
    (best, best_d2.sqrt())
}

/// One learning step: every model within grid distance `radius` of the
/// winner moves a fraction `alpha` of the way towards `x`. Returns the
/// winner's index.
pub fn train_step(grid: &mut SomGrid, x: &PixelVector, alpha: f64, radius: f64) -> usize {
    let (winner, _) = best_matching_unit(x, grid);
    let xs = x.components();
    for i in 0..grid.len() {
        if grid.grid_distance(winner, i) > radius {
            continue;
        }
        let m = &mut grid.models_mut()[i];
        let updated = std::array::from_fn(|k| {
            let c = m.0[k];
            (c + alpha * (xs[k] - c)).clamp(0.0, 1.0)
        });
        m.0 = updated;
    }
    winner
}

/// Sequential training: `params.iterations` presentations of pixels drawn
/// uniformly from the training stream of `params.seed`.
pub fn train(grid: &SomGrid, pixels: &[PixelVector], params: &TrainingParams) -> Result<SomGrid, SomError> {
    if pixels.is_empty() {
        return Err(SomError::EmptyImage);
    }
    params.validate()?;
    let mut out = grid.clone();
    let mut rng = SplitMix64::training_stream(params.seed);
    for t in 0..params.iterations {
        let x = pixels[rng.next_index(pixels.len())];
        let (alpha, radius) = params.schedule(t);
        train_step(&mut out, &x, alpha, radius);
    }
    Ok(out)
}
