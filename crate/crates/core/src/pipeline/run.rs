use rayon::prelude::*;

use super::config::RunConfig;
use super::manifest::Manifest;
use super::report::{Correlation, QeReport, QeRow, Trend};
use super::PipelineError;
use crate::imaging::{
    load_image, normalize_contrast, register_stack_to, RasterImage, RegisterError, RegistrationOptions,
    RegistrationTransform, TransformRecord,
};
use crate::som::{initialize_grid, pixel_vectors, quantization_error, train, SomError, SomGrid};
use crate::stats::{linear_fit, pearson, Series, StatsError, YearFix};

/// One image of a time series.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub label: String,
    pub year: f64,
    pub image: RasterImage,
}

/// Frames after co-registration and contrast normalization.
#[derive(Debug, Clone)]
pub struct PreparedStack {
    pub frames: Vec<Frame>,
    pub transforms: Vec<TransformRecord>,
    pub anchor: usize,
}

pub fn load_frames(manifest: &Manifest) -> Result<Vec<Frame>, PipelineError> {
    manifest
        .entries
        .par_iter()
        .enumerate()
        .map(|(index, entry)| {
            let image = load_image(&entry.path).map_err(|source| PipelineError::Load { index, source })?;
            Ok(Frame {
                label: entry.label.clone(),
                year: entry.year,
                image,
            })
        })
        .collect()
}

/// Registers the stack onto the anchor (if enabled), then normalizes each
/// registered frame (if enabled).
pub fn prepare_frames(frames: Vec<Frame>, config: &RunConfig) -> Result<PreparedStack, PipelineError> {
    let anchor = config
        .anchor
        .resolve(frames.len())
        .ok_or(RegisterError::AnchorOutOfRange {
            anchor: match config.anchor {
                super::AnchorPolicy::Index(i) => i,
                super::AnchorPolicy::Last => 0,
            },
            len: frames.len(),
        })?;
    let expected = (frames[anchor].image.width(), frames[anchor].image.height());
    for (index, f) in frames.iter().enumerate() {
        let actual = (f.image.width(), f.image.height());
        if actual != expected {
            return Err(RegisterError::DimensionMismatch {
                index,
                expected,
                actual,
            }
            .into());
        }
    }

    let (images, transforms): (Vec<RasterImage>, Vec<TransformRecord>) = if config.register {
        let images: Vec<RasterImage> = frames.iter().map(|f| f.image.clone()).collect();
        let registered = register_stack_to(&images, anchor, &RegistrationOptions::with_mode(config.mode))?;
        registered
            .into_iter()
            .enumerate()
            .map(|(i, r)| (r.image, (i, r.transform, r.residual)))
            .unzip()
    } else {
        frames
            .iter()
            .enumerate()
            .map(|(i, f)| (f.image.clone(), (i, RegistrationTransform::identity(config.mode), 0.0)))
            .unzip()
    };

    let frames = frames
        .into_iter()
        .zip(images)
        .map(|(f, image)| Frame {
            image: if config.normalize {
                normalize_contrast(&image)
            } else {
                image
            },
            ..f
        })
        .collect();
    Ok(PreparedStack {
        frames,
        transforms,
        anchor,
    })
}

/// Initializes and trains the map on the prepared anchor frame.
pub fn train_on_anchor(stack: &PreparedStack, config: &RunConfig) -> Result<SomGrid, PipelineError> {
    train_on_image(&stack.frames[stack.anchor].image, config)
}

pub(crate) fn train_on_image(image: &RasterImage, config: &RunConfig) -> Result<SomGrid, PipelineError> {
    config.som.validate()?;
    let pixels = pixel_vectors(image);
    let (w, h) = config.grid;
    let init = initialize_grid(&pixels, w, h, config.som.seed)?;
    Ok(train(&init, &pixels, &config.som)?)
}

/// QE of every frame against a trained map, in frame order.
pub fn score_frames(frames: &[Frame], grid: &SomGrid) -> Result<Vec<QeRow>, PipelineError> {
    frames
        .par_iter()
        .map(|f| {
            let result = quantization_error(&pixel_vectors(&f.image), grid)?;
            Ok::<_, SomError>(QeRow {
                label: f.label.clone(),
                year: f.year,
                qe: result.qe,
                empty_models: result.empty_models(),
            })
        })
        .collect::<Result<_, _>>()
        .map_err(Into::into)
}

/// Least-squares QE-vs-year trend; degenerate inputs are flagged rather than
/// treated as errors.
pub fn fit_trend(rows: &[QeRow], year_fix: YearFix) -> Trend {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.year, r.qe)).collect();
    let df = rows.len().saturating_sub(2);
    let series = match Series::new("qe", year_fix.apply(&points)) {
        Ok(s) => s,
        Err(e) => {
            return Trend::Degenerate {
                slope: f64::NAN,
                intercept: f64::NAN,
                df,
                reason: e.to_string(),
            }
        }
    };
    match linear_fit(&series) {
        Ok(fit) => Trend::Fitted(fit),
        Err(StatsError::ConstantResponse) => Trend::Degenerate {
            slope: 0.0,
            intercept: rows[0].qe,
            df,
            reason: "QE is constant across the series; r2 is undefined".to_owned(),
        },
        Err(e) => Trend::Degenerate {
            slope: f64::NAN,
            intercept: f64::NAN,
            df,
            reason: e.to_string(),
        },
    }
}

/// Full pipeline on frames already in memory.
pub fn run_frames(roi_name: &str, frames: Vec<Frame>, config: &RunConfig) -> Result<QeReport, PipelineError> {
    if frames.is_empty() {
        return Err(RegisterError::EmptyStack.into());
    }
    let stack = prepare_frames(frames, config)?;
    let grid = train_on_anchor(&stack, config)?;
    let rows = score_frames(&stack.frames, &grid)?;
    let trend = fit_trend(&rows, config.year_fix);
    Ok(QeReport {
        roi_name: roi_name.to_owned(),
        rows,
        grid,
        transforms: stack.transforms,
        trend,
        correlations: Vec::new(),
    })
}

pub fn run_pipeline(manifest: &Manifest, config: &RunConfig) -> Result<QeReport, PipelineError> {
    let frames = load_frames(manifest)?;
    run_frames(&manifest.roi_name, frames, config)
}

/// Appends one Pearson correlation per covariate, pairing covariate
/// observations with report rows by position.
pub fn correlate(report: &QeReport, covariates: &[Series]) -> Result<QeReport, PipelineError> {
    let qe = Series::new(
        format!("qe {}", report.roi_name),
        report.rows.iter().map(|r| (r.year, r.qe)).collect(),
    )?;
    let mut out = report.clone();
    for cov in covariates {
        let result = pearson(&qe, cov)?;
        for (row, &(year, _)) in report.rows.iter().zip(cov.points()) {
            if row.year != year {
                log::warn!(
                    "covariate '{}' year {year} paired with image '{}' ({})",
                    cov.label(),
                    row.label,
                    row.year
                );
            }
        }
        out.correlations.push(Correlation {
            label: cov.label().to_owned(),
            values: cov.ys(),
            result,
        });
    }
    Ok(out)
}
