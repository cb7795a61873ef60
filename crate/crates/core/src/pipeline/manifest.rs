//! Image-series manifest: UTF-8, one `path<TAB>label<TAB>year` entry per
//! line, `#` comments. A comment of the form `# roi: <name>` names the region
//! of interest. Relative paths resolve against the manifest's directory.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::stats::parse_decimal;

#[derive(Debug, Error, PartialEq)]
pub enum ManifestError {
    #[error("manifest line {line}: expected path<TAB>label<TAB>year")]
    Fields { line: usize },
    #[error("manifest line {line}: bad year '{text}'")]
    Year { line: usize, text: String },
    #[error("manifest line {line}: duplicate path {path}")]
    DuplicatePath { line: usize, path: PathBuf },
    #[error("manifest has no entries")]
    Empty,
    #[error("cannot read manifest {path}: {message}")]
    Read { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub label: String,
    pub year: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub roi_name: String,
    /// Stack order; the default anchor is the last entry.
    pub entries: Vec<ManifestEntry>,
}

pub fn parse_manifest(text: &str, base_dir: &Path, default_roi: &str) -> Result<Manifest, ManifestError> {
    let mut roi_name = default_roi.to_owned();
    let mut entries = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if let Some(name) = comment.trim().strip_prefix("roi:") {
                roi_name = name.trim().to_owned();
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let [path, label, year] = fields[..] else {
            return Err(ManifestError::Fields { line: line_no });
        };
        if path.trim().is_empty() {
            return Err(ManifestError::Fields { line: line_no });
        }
        let year = parse_decimal(year).ok_or_else(|| ManifestError::Year {
            line: line_no,
            text: year.to_owned(),
        })?;
        let path = base_dir.join(path.trim());
        if !seen.insert(path.clone()) {
            return Err(ManifestError::DuplicatePath { line: line_no, path });
        }
        entries.push(ManifestEntry {
            path,
            label: label.trim().to_owned(),
            year,
        });
    }
    if entries.is_empty() {
        return Err(ManifestError::Empty);
    }
    Ok(Manifest { roi_name, entries })
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest, ManifestError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Read {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("roi");
    parse_manifest(&text, base, stem)
}
