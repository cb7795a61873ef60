use super::student::two_tailed_p;
use super::{centered, Series, StatsError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegressionResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// `sqrt(r2 df / (1 - r2))`; infinite for a perfect fit.
    pub t: f64,
    /// `n - 2`.
    pub df: usize,
    pub p: f64,
}

/// Ordinary least squares `y = intercept + slope x`.
pub fn linear_fit(series: &Series) -> Result<RegressionResult, StatsError> {
    let n = series.len();
    if n < 3 {
        return Err(StatsError::TooFewPoints(n));
    }
    let xs = series.xs();
    let ys = series.ys();
    let (sxx, mx) = centered(&xs);
    let (syy, my) = centered(&ys);
    if sxx == 0.0 {
        return Err(StatsError::DegenerateX);
    }
    if syy == 0.0 {
        return Err(StatsError::ConstantResponse);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = (1.0 - ss_res / syy).clamp(0.0, 1.0);
    let df = n - 2;
    let t = if r2 < 1.0 {
        (r2 * df as f64 / (1.0 - r2)).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(RegressionResult {
        slope,
        intercept,
        r2,
        t,
        df,
        p: two_tailed_p(t, df)?,
    })
}
