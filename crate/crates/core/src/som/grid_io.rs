//! Text serialization for trained maps:
//!
//! ```text
//! somqe-grid v1 <width> <height>
//! <r> <g> <b>          # one model per line, row-major, 17 significant digits
//! ```

use std::path::Path;

use thiserror::Error;

use super::{PixelVector, SomGrid};
use crate::atomic::write_atomic;
use crate::numfmt::sig;

pub const GRID_MAGIC: &str = "somqe-grid";

#[derive(Debug, Error)]
pub enum GridFormatError {
    #[error("bad grid header: {0}")]
    Header(String),
    #[error("line {line}: {message}")]
    Model { line: usize, message: String },
    #[error("expected {expected} models, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn format_grid(grid: &SomGrid) -> String {
    let mut out = format!("{GRID_MAGIC} v1 {} {}\n", grid.width(), grid.height());
    for m in grid.models() {
        let [r, g, b] = m.components();
        out.push_str(&format!("{} {} {}\n", sig(r, 17), sig(g, 17), sig(b, 17)));
    }
    out
}

pub fn parse_grid(text: &str) -> Result<SomGrid, GridFormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| GridFormatError::Header("empty input".to_owned()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [magic, version, w, h] = fields[..] else {
        return Err(GridFormatError::Header(header.to_owned()));
    };
    if magic != GRID_MAGIC || version != "v1" {
        return Err(GridFormatError::Header(header.to_owned()));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| GridFormatError::Header(format!("bad dimension '{s}'")))
    };
    let (width, height) = (dim(w)?, dim(h)?);
    let expected = width
        .checked_mul(height)
        .ok_or_else(|| GridFormatError::Header("dimensions overflow".to_owned()))?;

    let mut models = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if models.len() == expected {
            return Err(GridFormatError::Count {
                expected,
                found: models.len() + 1,
            });
        }
        let mut comps = [0.0; 3];
        let mut fields = line.split_whitespace();
        for c in comps.iter_mut() {
            let f = fields.next().ok_or_else(|| GridFormatError::Model {
                line: line_no,
                message: "expected 3 components".to_owned(),
            })?;
            *c = f.parse().map_err(|_| GridFormatError::Model {
                line: line_no,
                message: format!("bad number '{f}'"),
            })?;
        }
        if fields.next().is_some() {
            return Err(GridFormatError::Model {
                line: line_no,
                message: "expected 3 components".to_owned(),
            });
        }
        let model = PixelVector::new(comps).map_err(|e| GridFormatError::Model {
            line: line_no,
            message: e.to_string(),
        })?;
        models.push(model);
    }
    if models.len() != expected {
        return Err(GridFormatError::Count {
            expected,
            found: models.len(),
        });
    }
    Ok(SomGrid::new(width, height, models).expect("shape checked above"))
}

pub fn save_grid(grid: &SomGrid, path: impl AsRef<Path>) -> Result<(), GridFormatError> {
    write_atomic(path.as_ref(), format_grid(grid).as_bytes())?;
    Ok(())
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<SomGrid, GridFormatError> {
    parse_grid(&std::fs::read_to_string(path)?)
}
