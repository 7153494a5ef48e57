//! Forecast evaluation: RMSE, MAPE, mean positive error and mean training
//! time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_pairs(actuals: &[f64], predictions: &[f64]) -> Result<()> {
    if actuals.len() != predictions.len() {
        return Err(Error::LengthMismatch {
            left: actuals.len(),
            right: predictions.len(),
        });
    }
    if actuals.is_empty() {
        return Err(Error::EmptyInput);
    }
    for (i, (a, p)) in actuals.iter().zip(predictions).enumerate() {
        if !a.is_finite() || !p.is_finite() {
            return Err(Error::NonFinite(i));
        }
    }
    Ok(())
}

/// Root mean squared error, in the units of the inputs.
pub fn rmse(actuals: &[f64], predictions: &[f64]) -> Result<f64> {
    check_pairs(actuals, predictions)?;
    let sse: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p) * (a - p))
        .sum();
    Ok((sse / actuals.len() as f64).sqrt())
}

/// Mean absolute percentage error as a fraction (0.05 = 5%).
pub fn mape(actuals: &[f64], predictions: &[f64]) -> Result<f64> {
    check_pairs(actuals, predictions)?;
    if let Some(i) = actuals.iter().position(|a| *a == 0.0) {
        return Err(Error::ZeroActual(i));
    }
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p).abs() / a.abs())
        .sum();
    Ok(sum / actuals.len() as f64)
}

/// Mean positive error: the average amount by which predictions exceed the
/// actual value, with under-predictions counting as zero.
pub fn mpe(actuals: &[f64], predictions: &[f64]) -> Result<f64> {
    check_pairs(actuals, predictions)?;
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (p - a).max(0.0))
        .sum();
    Ok(sum / actuals.len() as f64)
}

pub fn mae(actuals: &[f64], predictions: &[f64]) -> Result<f64> {
    check_pairs(actuals, predictions)?;
    let sum: f64 = actuals
        .iter()
        .zip(predictions)
        .map(|(a, p)| (a - p).abs())
        .sum();
    Ok(sum / actuals.len() as f64)
}

/// Mean training time in seconds.
pub fn mtt(durations: &[f64]) -> Result<f64> {
    if durations.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(i) = durations.iter().position(|d| !d.is_finite() || *d < 0.0) {
        return Err(Error::NonFinite(i));
    }
    Ok(durations.iter().sum::<f64>() / durations.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub rmse: f64,
    /// Fraction; see [`MetricSet::mape_percent`].
    pub mape: f64,
    pub mpe: f64,
    pub mtt: f64,
    pub n: usize,
    pub n_rolls: usize,
}

impl MetricSet {
    pub fn mape_percent(&self) -> f64 {
        self.mape * 100.0
    }
}

/// Pools every (actual, prediction) pair and averages the per-roll durations.
pub fn metric_set(actuals: &[f64], predictions: &[f64], durations: &[f64]) -> Result<MetricSet> {
    Ok(MetricSet {
        rmse: rmse(actuals, predictions)?,
        mape: mape(actuals, predictions)?,
        mpe: mpe(actuals, predictions)?,
        mtt: mtt(durations)?,
        n: actuals.len(),
        n_rolls: durations.len(),
    })
}
