use statrs::function::beta::beta_reg;

use super::StatsError;

/// Smallest p-value reported.
pub const P_FLOOR: f64 = 1e-15;

/// Two-tailed Student-t tail probability `P(|T| >= |t|)` with `df` degrees of
/// freedom, via `I_{df/(df+t^2)}(df/2, 1/2)`. Floored at [`P_FLOOR`].
pub fn two_tailed_p(t: f64, df: usize) -> Result<f64, StatsError> {
    if df < 1 {
        return Err(StatsError::InvalidDf(df));
    }
    if t.is_nan() {
        return Err(StatsError::NanStatistic);
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if t.is_infinite() {
        return Ok(P_FLOOR);
    }
    let nu = df as f64;
    let x = nu / (nu + t * t);
    Ok(beta_reg(nu / 2.0, 0.5, x).clamp(P_FLOOR, 1.0))
}
