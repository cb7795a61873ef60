//! Least-squares trends, Student-t significance and Pearson correlation.

mod correlation;
mod regression;
mod series;
mod student;

use thiserror::Error;

pub use correlation::{pearson, pearson_values, CorrelationResult};
pub use regression::{linear_fit, RegressionResult};
pub use series::{parse_decimal, Series, YearFix};
pub use student::{two_tailed_p, P_FLOOR};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("x values are all equal")]
    DegenerateX,
    #[error("y values are all equal; the fit is degenerate")]
    ConstantResponse,
    #[error("series lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("series '{0}' has zero variance")]
    ZeroVariance(String),
    #[error("degrees of freedom must be at least 1, got {0}")]
    InvalidDf(usize),
    #[error("non-finite value in series '{0}'")]
    NonFinite(String),
    #[error("statistic is NaN")]
    NanStatistic,
}

/// `sum((v - mean)^2)`, and the mean.
fn centered(values: &[f64]) -> (f64, f64) {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    (values.iter().map(|v| (v - mean) * (v - mean)).sum(), mean)
}
