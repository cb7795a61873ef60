//! Covariate tables: a header `year,<name1>,<name2>,...` followed by one row
//! per observation. The delimiter is ',' unless the header contains a tab or
//! ';'. Values may use ',' as the decimal separator; in a comma-delimited
//! file an unquoted decimal comma is recognized when a row has exactly two
//! fields per value column.

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::stats::{parse_decimal, Series};

#[derive(Debug, Error, PartialEq)]
pub enum CovariateError {
    #[error("covariate header must start with 'year' and name at least one column")]
    Header,
    #[error("row {row}, column {column}: cannot parse '{text}'")]
    Cell { row: usize, column: usize, text: String },
    #[error("row {row}: expected {expected} fields, found {found}")]
    Width { row: usize, expected: usize, found: usize },
    #[error("no data rows")]
    Empty,
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovariateSet {
    /// One series per value column, x = year.
    pub series: Vec<Series>,
    /// Non-fatal findings such as repeated years (rows are kept as printed).
    pub warnings: Vec<String>,
}

pub fn ingest_covariates(path: impl AsRef<Path>, decimal_comma: bool) -> Result<CovariateSet, CovariateError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CovariateError::Read {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    parse_covariates(&text, decimal_comma)
}

pub fn parse_covariates(text: &str, decimal_comma: bool) -> Result<CovariateSet, CovariateError> {
    let header_line = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .ok_or(CovariateError::Header)?;
    let delimiter = if header_line.contains('\t') {
        b'\t'
    } else if header_line.contains(';') {
        b';'
    } else {
        b','
    };
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut records = reader.records();
    let header = records.next().and_then(Result::ok).ok_or(CovariateError::Header)?;
    let names: Vec<String> = header.iter().map(str::to_owned).collect();
    if names.len() < 2 || !names[0].eq_ignore_ascii_case("year") {
        return Err(CovariateError::Header);
    }
    let ncols = names.len();
    let parse = |s: &str| {
        if decimal_comma {
            parse_decimal(s)
        } else {
            s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
        }
    };

    let mut columns: Vec<Vec<(f64, f64)>> = vec![Vec::new(); ncols - 1];
    let mut years: Vec<f64> = Vec::new();
    let mut warnings = Vec::new();
    for (i, record) in records.enumerate() {
        // Row numbers count the header as row 1.
        let row = i + 2;
        let record = record.map_err(|e| CovariateError::Cell {
            row,
            column: 0,
            text: e.to_string(),
        })?;
        let fields: Vec<String> = if record.len() == ncols {
            record.iter().map(str::to_owned).collect()
        } else if decimal_comma && delimiter == b',' && record.len() == 1 + 2 * (ncols - 1) {
            regroup_decimal_commas(&record).ok_or(CovariateError::Width {
                row,
                expected: ncols,
                found: record.len(),
            })?
        } else {
            return Err(CovariateError::Width {
                row,
                expected: ncols,
                found: record.len(),
            });
        };
        let values: Vec<f64> = fields
            .iter()
            .enumerate()
            .map(|(column, text)| {
                parse(text).ok_or_else(|| CovariateError::Cell {
                    row,
                    column,
                    text: text.clone(),
                })
            })
            .collect::<Result<_, _>>()?;
        let year = values[0];
        if years.contains(&year) {
            let msg = format!("row {row}: year {year} repeats an earlier row; both kept as printed");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        years.push(year);
        for (col, &v) in columns.iter_mut().zip(&values[1..]) {
            col.push((year, v));
        }
    }
    if years.is_empty() {
        return Err(CovariateError::Empty);
    }
    let series = names[1..]
        .iter()
        .zip(columns)
        .map(|(name, points)| Series::new(name.clone(), points).expect("values parsed as finite"))
        .collect();
    Ok(CovariateSet { series, warnings })
}

/// `year,12,8,191,0` -> `year, 12.8, 191.0`.
fn regroup_decimal_commas(record: &csv::StringRecord) -> Option<Vec<String>> {
    let mut out = vec![record[0].to_owned()];
    let rest: Vec<&str> = record.iter().skip(1).collect();
    for pair in rest.chunks_exact(2) {
        let (int, frac) = (pair[0], pair[1]);
        if int.contains('.') || frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        out.push(format!("{int}.{frac}"));
    }
    Some(out)
}
