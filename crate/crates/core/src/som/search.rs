use super::qe::{empty_model_count, quantization_error};
use super::train::{initialize_grid, train};
use super::{PixelVector, SomError, SomGrid, TrainingParams};

#[derive(Debug, Clone, PartialEq)]
pub struct MapSizeTrial {
    pub width: usize,
    pub height: usize,
    pub qe: f64,
    pub empty_models: usize,
}

#[derive(Debug, Clone)]
pub struct MapSizeReport {
    pub chosen: (usize, usize),
    pub grid: SomGrid,
    pub trials: Vec<MapSizeTrial>,
    /// Set when every candidate left at least one model empty.
    pub all_have_empty_models: bool,
}

/// Trains one map per candidate size and keeps the largest one whose models
/// all attract some pixel, preferring lower QE among equally large maps.
/// When every candidate has empty models, the one with the fewest wins.
pub fn map_size_search(
    pixels: &[PixelVector],
    candidates: &[(usize, usize)],
    params: &TrainingParams,
) -> Result<MapSizeReport, SomError> {
    if candidates.is_empty() {
        return Err(SomError::NoCandidates);
    }
    let mut trials = Vec::with_capacity(candidates.len());
    let mut grids = Vec::with_capacity(candidates.len());
    for &(width, height) in candidates {
        let init = initialize_grid(pixels, width, height, params.seed)?;
        let grid = train(&init, pixels, params)?;
        let result = quantization_error(pixels, &grid)?;
        log::debug!(
            "map {width}x{height}: qe={} empty={}",
            result.qe,
            empty_model_count(&result)
        );
        trials.push(MapSizeTrial {
            width,
            height,
            qe: result.qe,
            empty_models: empty_model_count(&result),
        });
        grids.push(grid);
    }

    let all_have_empty_models = trials.iter().all(|t| t.empty_models > 0);
    let better = |a: &MapSizeTrial, b: &MapSizeTrial| -> bool {
        if all_have_empty_models {
            (a.empty_models, a.qe) < (b.empty_models, b.qe)
        } else {
            let (sa, sb) = (a.width * a.height, b.width * b.height);
            sa > sb || (sa == sb && a.qe < b.qe)
        }
    };
    let mut best: Option<usize> = None;
    for (i, t) in trials.iter().enumerate() {
        if !all_have_empty_models && t.empty_models > 0 {
            continue;
        }
        if best.is_none_or(|b| better(t, &trials[b])) {
            best = Some(i);
        }
    }
    let best = best.expect("at least one eligible candidate");
    Ok(MapSizeReport {
        chosen: (trials[best].width, trials[best].height),
        grid: grids.swap_remove(best),
        trials,
        all_have_empty_models,
    })
}
