//! End-to-end orchestration: manifest and configuration ingestion, stack
//! preprocessing, anchor-image training, per-image scoring, statistics and
//! report emission.

mod config;
mod covariates;
mod error;
mod manifest;
mod report;
mod run;
mod svg;

pub use config::{parse_config, parse_grid_dims, AnchorPolicy, ConfigError, RunConfig};
pub use covariates::{ingest_covariates, parse_covariates, CovariateError, CovariateSet};
pub use error::PipelineError;
pub use manifest::{load_manifest, parse_manifest, Manifest, ManifestEntry, ManifestError};
pub use report::{
    emit_csv, format_correlation_rows, format_csv, format_regression_rows, Correlation, QeReport, QeRow, Trend,
};
pub use run::{
    correlate, fit_trend, load_frames, prepare_frames, run_frames, run_pipeline, score_frames, train_on_anchor, Frame,
    PreparedStack,
};
pub use svg::{emit_svg_plots, scatter_svg, ScatterPlot};
