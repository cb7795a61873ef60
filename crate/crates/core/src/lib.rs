//! Change detection in registered image time series via the quantization
//! error of a small self-organizing map, with the trend and correlation
//! statistics used to relate the resulting series to external covariates.
//!
//! The crate is organized as:
//!
//! * [`som`]: map state, training, quantization error, map-size search.
//! * [`imaging`]: PPM/PNG IO, contrast normalization, stack co-registration.
//! * [`stats`]: least-squares trends, Student-t p-values, Pearson correlation.
//! * [`pipeline`]: manifests, configuration, end-to-end runs and reports.

pub mod atomic;
pub mod imaging;
pub mod numfmt;
pub mod pipeline;
pub mod rng;
pub mod som;
pub mod stats;
