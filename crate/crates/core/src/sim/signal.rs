//! Stimulus processing used by expectation agents: Weber-fraction distinction
//! detection, the moving-average pre-processing filter and trend fitting.

use thiserror::Error;

/// Guards the relative change against a zero reference stimulus.
pub const WEBER_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignalError {
    #[error("series is empty")]
    EmptySeries,
    #[error("filter window must be at least 1")]
    ZeroWindow,
    #[error("need at least 2 points, found {0}")]
    InsufficientData(usize),
}

impl SignalError {
    pub fn code(&self) -> &'static str {
        match self {
            SignalError::EmptySeries => "EMPTY_SERIES",
            SignalError::ZeroWindow => "INVALID_WINDOW",
            SignalError::InsufficientData(_) => "INSUFFICIENT_DATA",
        }
    }
}

/// A change registers when its size relative to the previous stimulus reaches
/// the Weber fraction `k`.
pub fn detect_distinction(prev: f64, next: f64, weber_k: f64) -> bool {
    (next - prev).abs() / prev.abs().max(WEBER_FLOOR) >= weber_k
}

/// Centered moving average, truncated at both ends. For even windows the
/// extra sample is taken from the past, so a window of 2 averages each point
/// with its predecessor.
pub fn preprocess_filter(series: &[f64], window: usize) -> Result<Vec<f64>, SignalError> {
    if series.is_empty() {
        return Err(SignalError::EmptySeries);
    }
    if window == 0 {
        return Err(SignalError::ZeroWindow);
    }
    let back = window / 2;
    let ahead = window - 1 - back;
    let mut prefix = Vec::with_capacity(series.len() + 1);
    prefix.push(0.0);
    for x in series {
        prefix.push(prefix.last().unwrap() + x);
    }
    Ok((0..series.len())
        .map(|i| {
            let lo = i.saturating_sub(back);
            let hi = (i + ahead).min(series.len() - 1);
            (prefix[hi + 1] - prefix[lo]) / (hi + 1 - lo) as f64
        })
        .collect())
}

/// Ordinary least-squares slope of `ys` against `0, 1, 2, ...`.
pub fn ols_slope(ys: &[f64]) -> Result<f64, SignalError> {
    if ys.len() < 2 {
        return Err(SignalError::InsufficientData(ys.len()));
    }
    let n = ys.len() as f64;
    let x_mean = (n - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (i, y) in ys.iter().enumerate() {
        let dx = i as f64 - x_mean;
        sxy += dx * (y - y_mean);
        sxx += dx * dx;
    }
    Ok(sxy / sxx)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Successful,
    NotSuccessful,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Successful => "SUCCESSFUL",
            Verdict::NotSuccessful => "NOT_SUCCESSFUL",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct Trend {
    pub slope: f64,
    pub verdict: Verdict,
}

/// Filters a per-tick count series and fits its trend. Decreasing interaction
/// is read as successful operation.
pub fn trend_of_series(counts: &[f64], window: usize) -> Result<Trend, SignalError> {
    if counts.len() < 2 {
        return Err(SignalError::InsufficientData(counts.len()));
    }
    let filtered = preprocess_filter(counts, window)?;
    let slope = ols_slope(&filtered)?;
    let verdict = if slope < 0.0 {
        Verdict::Successful
    } else {
        Verdict::NotSuccessful
    };
    Ok(Trend { slope, verdict })
}

/// Population coefficient of variation; zero for an all-zero series.
pub fn coefficient_of_variation(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean.abs()
}
