use crate::error::{Error, Result};

/// Default chain length for autocorrelation estimates.
pub const DEFAULT_ACF_SAMPLES: usize = 10_000;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Uncentred autocorrelation of vector states:
///
/// ```text
/// ACF(tau) = sum_{t=1}^{N-tau} x_t . x_{t+tau} / sum_{t=1}^{N} x_t . x_t
/// ```
///
/// for `tau = 0..=max_lag`.
pub fn acf<S: AsRef<[f64]>>(series: &[S], max_lag: usize) -> Result<Vec<f64>> {
    let n = series.len();
    if n <= max_lag {
        return Err(Error::InvalidInput(format!("series length {n} must exceed max_lag {max_lag}")));
    }
    let d = series[0].as_ref().len();
    if let Some(s) = series.iter().find(|s| s.as_ref().len() != d) {
        return Err(Error::DimensionMismatch { expected: d, got: s.as_ref().len() });
    }
    let denom: f64 = series.iter().map(|x| dot(x.as_ref(), x.as_ref())).sum();
    if denom == 0.0 {
        return Err(Error::Domain { what: "autocorrelation of an all-zero series", value: 0.0 });
    }
    Ok((0..=max_lag)
        .map(|tau| {
            if tau == 0 {
                return 1.0;
            }
            let num: f64 = (0..n - tau).map(|t| dot(series[t].as_ref(), series[t + tau].as_ref())).sum();
            num / denom
        })
        .collect())
}
