use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use super::StatsError;

/// Labeled sequence of `(x, y)` observations, usually `(year, value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Result<Self, StatsError> {
        let label = label.into();
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(StatsError::NonFinite(label));
        }
        Ok(Self { label, points })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn xs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }

    /// x values occurring more than once, in order of first repeat.
    pub fn duplicate_xs(&self) -> Vec<f64> {
        let mut seen = Vec::new();
        let mut dups = Vec::new();
        for &(x, _) in &self.points {
            if seen.contains(&x) {
                if !dups.contains(&x) {
                    dups.push(x);
                }
            } else {
                seen.push(x);
            }
        }
        dups
    }

    pub fn with_year_fix(&self, fix: YearFix) -> Series {
        Series {
            label: self.label.clone(),
            points: fix.apply(&self.points),
        }
    }
}

/// How to treat a year label that appears twice in a printed table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YearFix {
    /// Keep the years exactly as printed.
    #[default]
    AsPrinted,
    /// Relabel the first of two equal years `y` to `y - 1` when `y - 1` is
    /// absent (the printed "1991, 1991" becomes "1990, 1991").
    Relabel1990,
}

impl YearFix {
    pub fn apply(self, points: &[(f64, f64)]) -> Vec<(f64, f64)> {
        let mut out = points.to_vec();
        if self == YearFix::AsPrinted {
            return out;
        }
        let years: HashSet<u64> = points.iter().map(|p| p.0.to_bits()).collect();
        for i in 0..out.len() {
            let y = out[i].0;
            let repeated_later = out[i + 1..].iter().any(|p| p.0 == y);
            let previous_free = !years.contains(&(y - 1.0).to_bits()) && !out[..i].iter().any(|p| p.0 == y - 1.0);
            if repeated_later && previous_free {
                out[i].0 = y - 1.0;
            }
        }
        out
    }
}

impl fmt::Display for YearFix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            YearFix::AsPrinted => "as-printed",
            YearFix::Relabel1990 => "relabel-1990",
        })
    }
}

impl FromStr for YearFix {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "as-printed" => Ok(YearFix::AsPrinted),
            "relabel-1990" => Ok(YearFix::Relabel1990),
            other => Err(format!("unknown year fix '{other}'")),
        }
    }
}

/// Parses a finite decimal number written with either '.' or ',' as the
/// decimal separator ("12.8" and "12,8" are equal). Thousands separators are
/// not accepted.
pub fn parse_decimal(text: &str) -> Option<f64> {
    let t = text.trim();
    if t.is_empty() {
        return None;
    }
    let commas = t.matches(',').count();
    let value: f64 = match (commas, t.contains('.')) {
        (0, _) => t.parse().ok()?,
        (1, false) => t.replacen(',', ".", 1).parse().ok()?,
        _ => return None,
    };
    // Rejects "inf"/"nan" spellings as well as overflow.
    value.is_finite().then_some(value)
}
