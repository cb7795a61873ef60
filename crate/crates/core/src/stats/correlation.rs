use super::student::two_tailed_p;
use super::{centered, Series, StatsError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    pub r: f64,
    /// `|r| sqrt(df / (1 - r^2))`; infinite when `|r| = 1`.
    pub t: f64,
    pub df: usize,
    pub p: f64,
}

/// Pearson correlation of the y-values of two series paired by position.
pub fn pearson(a: &Series, b: &Series) -> Result<CorrelationResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    pearson_labeled(&a.ys(), &b.ys(), a.label(), b.label())
}

pub fn pearson_values(a: &[f64], b: &[f64]) -> Result<CorrelationResult, StatsError> {
    pearson_labeled(a, b, "a", "b")
}

fn pearson_labeled(a: &[f64], b: &[f64], la: &str, lb: &str) -> Result<CorrelationResult, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 3 {
        return Err(StatsError::TooFewPoints(n));
    }
    let (saa, ma) = centered(a);
    let (sbb, mb) = centered(b);
    if saa == 0.0 {
        return Err(StatsError::ZeroVariance(la.to_owned()));
    }
    if sbb == 0.0 {
        return Err(StatsError::ZeroVariance(lb.to_owned()));
    }
    let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let r = (sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0);
    let df = n - 2;
    let t = if r.abs() < 1.0 {
        r.abs() * (df as f64 / (1.0 - r * r)).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(CorrelationResult {
        r,
        t,
        df,
        p: two_tailed_p(t, df)?,
    })
}
