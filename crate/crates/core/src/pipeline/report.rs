//! CSV rendering of a run. Sections are separated by a blank line:
//!
//! ```text
//! # somqe report
//! # roi: <name>
//! label,year,qe,empty_models
//! ...one row per image...
//!
//! label,slope,intercept,r2,t,df,p
//! qe_vs_year,...
//! # footnotes
//!
//! label,r,t,df,p          (only when covariates were correlated)
//! ...
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::PipelineError;
use crate::atomic::write_atomic;
use crate::imaging::TransformRecord;
use crate::numfmt::sig;
use crate::som::SomGrid;
use crate::stats::{CorrelationResult, RegressionResult};

#[derive(Debug, Clone, PartialEq)]
pub struct QeRow {
    pub label: String,
    pub year: f64,
    pub qe: f64,
    pub empty_models: usize,
}

/// Linear trend of QE against year.
#[derive(Debug, Clone, PartialEq)]
pub enum Trend {
    Fitted(RegressionResult),
    /// No meaningful fit exists (constant QE, too few images, or a single
    /// year). Slope and intercept are 0 and the mean for a constant series,
    /// NaN otherwise.
    Degenerate {
        slope: f64,
        intercept: f64,
        df: usize,
        reason: String,
    },
}

impl Trend {
    pub fn fit(&self) -> Option<&RegressionResult> {
        match self {
            Trend::Fitted(r) => Some(r),
            Trend::Degenerate { .. } => None,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        matches!(self, Trend::Degenerate { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub label: String,
    /// Covariate values paired with the report rows by position.
    pub values: Vec<f64>,
    pub result: CorrelationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QeReport {
    pub roi_name: String,
    pub rows: Vec<QeRow>,
    pub grid: SomGrid,
    pub transforms: Vec<TransformRecord>,
    pub trend: Trend,
    pub correlations: Vec<Correlation>,
}

const DIGITS: usize = 10;

pub(crate) fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_owned()
    }
}

pub(crate) fn fmt_year(year: f64) -> String {
    format!("{year}")
}

/// `label,slope,intercept,r2,t,df,p` header plus one row per fit, followed by
/// footnotes on the degrees of freedom and the slope in 1e-3 units.
pub fn format_regression_rows(fits: &[(String, RegressionResult)]) -> String {
    let mut out = String::from("label,slope,intercept,r2,t,df,p\n");
    for (label, r) in fits {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(label),
            sig(r.slope, DIGITS),
            sig(r.intercept, DIGITS),
            sig(r.r2, DIGITS),
            sig(r.t, DIGITS),
            r.df,
            sig(r.p, DIGITS)
        )
        .unwrap();
    }
    out.push_str("# df = n - 2 (t test on the slope); F-style listings print (1, n - 1)\n");
    for (label, r) in fits {
        writeln!(
            out,
            "# {}: slope = {} x 1e-3 per x unit",
            csv_field(label),
            sig(r.slope * 1e3, DIGITS)
        )
        .unwrap();
    }
    out
}

/// `label,r,t,df,p` header plus one row per correlation.
pub fn format_correlation_rows(rows: &[(String, CorrelationResult)]) -> String {
    let mut out = String::from("label,r,t,df,p\n");
    for (label, c) in rows {
        writeln!(
            out,
            "{},{},{},{},{}",
            csv_field(label),
            sig(c.r, DIGITS),
            sig(c.t, DIGITS),
            c.df,
            sig(c.p, DIGITS)
        )
        .unwrap();
    }
    out
}

pub fn format_csv(report: &QeReport) -> String {
    let mut out = String::from("# somqe report\n");
    writeln!(out, "# roi: {}", report.roi_name.replace(['\n', '\r'], " ")).unwrap();
    out.push_str("label,year,qe,empty_models\n");
    for row in &report.rows {
        writeln!(
            out,
            "{},{},{},{}",
            csv_field(&row.label),
            fmt_year(row.year),
            sig(row.qe, 12),
            row.empty_models
        )
        .unwrap();
    }
    out.push('\n');
    match &report.trend {
        Trend::Fitted(r) => out.push_str(&format_regression_rows(&[("qe_vs_year".to_owned(), *r)])),
        Trend::Degenerate {
            slope,
            intercept,
            df,
            reason,
        } => {
            out.push_str("label,slope,intercept,r2,t,df,p\n");
            writeln!(
                out,
                "qe_vs_year,{},{},nan,nan,{df},nan",
                sig(*slope, DIGITS),
                sig(*intercept, DIGITS)
            )
            .unwrap();
            writeln!(out, "# degenerate fit: {reason}").unwrap();
        }
    }
    if !report.correlations.is_empty() {
        out.push('\n');
        let rows: Vec<_> = report
            .correlations
            .iter()
            .map(|c| (format!("qe_vs_{}", c.label), c.result))
            .collect();
        out.push_str(&format_correlation_rows(&rows));
    }
    out
}

pub fn emit_csv(report: &QeReport, path: impl AsRef<Path>) -> Result<(), PipelineError> {
    let path = path.as_ref();
    write_atomic(path, format_csv(report).as_bytes()).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })
}
