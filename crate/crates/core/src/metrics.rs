//! Per-trajectory losses, wall-clock timing, and aggregate statistics.
//!
//! MSE here is the per-node mean, so a constant offset of c gives c^2. The
//! quantile rule is linear interpolation on sorted data (the R-7 convention),
//! and the standard deviation uses the population denominator N.

use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
}

/// Losses and timing for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleLoss {
    pub l_q: f64,
    pub l_p: f64,
    pub l_tot: f64,
    pub time_seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AggregateStats {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub iqr: f64,
    pub q1: f64,
    pub q3: f64,
}

/// Per-node mean squared error.
pub fn mse(truth: &[f64], pred: &[f64]) -> Result<f64, MetricsError> {
    if truth.len() != pred.len() || truth.is_empty() {
        return Err(MetricsError::LengthMismatch {
            left: truth.len(),
            right: pred.len(),
        });
    }
    let sum: f64 = truth
        .iter()
        .zip(pred)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / truth.len() as f64)
}

/// Position and momentum MSE plus their mean.
pub fn sample_loss(
    q_true: &[f64],
    p_true: &[f64],
    q_pred: &[f64],
    p_pred: &[f64],
    elapsed_seconds: f64,
) -> Result<SampleLoss, MetricsError> {
    let l_q = mse(q_true, q_pred)?;
    let l_p = mse(p_true, p_pred)?;
    Ok(SampleLoss {
        l_q,
        l_p,
        l_tot: 0.5 * (l_q + l_p),
        time_seconds: elapsed_seconds,
    })
}

/// Linear-interpolation quantile (R-7) of already sorted data.
fn quantile_sorted(sorted: &[f64], frac: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * frac;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, population std, median, and interquartile range.
pub fn aggregate(values: &[f64]) -> Result<AggregateStats, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    Ok(AggregateStats {
        mean,
        std: var.sqrt(),
        median,
        iqr: q3 - q1,
        q1,
        q3,
    })
}

/// Time one end-to-end production on a monotonic clock.
///
/// The first (warm-up) call is discarded; the returned trajectory and the
/// reported seconds come from the second call.
pub fn time_trajectory<T>(mut producer: impl FnMut() -> T) -> (T, f64) {
    let _ = producer();
    let start = Instant::now();
    let out = producer();
    (out, start.elapsed().as_secs_f64())
}
