//! Error metrics shared by every experiment cell.
//!
//! The headline number everywhere is the ratio-of-means relative error:
//! mean |pred - truth| over mean |truth|, times 100. Elementwise MAPE is a
//! different quantity (it averages pointwise ratios and blows up near zero
//! targets), so it is computed separately and stored alongside.

use serde::{Deserialize, Serialize};

use super::HarnessError;

/// Ratio-of-means relative error in percent.
pub fn relative_error_pct(pred: &[f64], truth: &[f64]) -> Result<f64, HarnessError> {
    check_lengths(pred, truth)?;
    let n = truth.len() as f64;
    let num: f64 = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / n;
    let den: f64 = truth.iter().map(|t| t.abs()).sum::<f64>() / n;
    if den == 0.0 {
        return Err(HarnessError::ZeroDenominator {
            context: "mean |truth| is zero".to_string(),
        });
    }
    Ok(num / den * 100.0)
}

/// Root-mean-square error.
pub fn rmse(pred: &[f64], truth: &[f64]) -> Result<f64, HarnessError> {
    check_lengths(pred, truth)?;
    let n = truth.len() as f64;
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    Ok((sse / n).sqrt())
}

/// Coefficient of determination around the evaluation-set mean.
pub fn r_squared(pred: &[f64], truth: &[f64]) -> Result<f64, HarnessError> {
    check_lengths(pred, truth)?;
    let n = truth.len() as f64;
    let mean = truth.iter().sum::<f64>() / n;
    let sse: f64 = pred.iter().zip(truth).map(|(p, t)| (p - t) * (p - t)).sum();
    let sst: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    if sst == 0.0 {
        return Err(HarnessError::ZeroDenominator {
            context: "truth variance is zero".to_string(),
        });
    }
    Ok(1.0 - sse / sst)
}

/// Elementwise mean absolute percentage error.
pub fn mape_pct(pred: &[f64], truth: &[f64]) -> Result<f64, HarnessError> {
    check_lengths(pred, truth)?;
    let mut acc = 0.0;
    for (p, t) in pred.iter().zip(truth) {
        if *t == 0.0 {
            return Err(HarnessError::ZeroDenominator {
                context: "elementwise MAPE with a zero target".to_string(),
            });
        }
        acc += ((p - t) / t).abs();
    }
    Ok(acc / truth.len() as f64 * 100.0)
}

fn check_lengths(pred: &[f64], truth: &[f64]) -> Result<(), HarnessError> {
    if pred.is_empty() || pred.len() != truth.len() {
        return Err(HarnessError::MetricShape {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    Ok(())
}

/// Per-seed values of one metric with their summary statistics.
///
/// `mean` and `std` are always recomputable from `per_seed`; loading a
/// record re-derives them and rejects mismatches. `std` uses the n-1
/// denominator and is zero for a single seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub per_seed: Vec<f64>,
    pub mean: f64,
    pub std: f64,
}

impl MetricSummary {
    pub fn from_values(per_seed: Vec<f64>) -> Self {
        let (mean, std) = mean_std(&per_seed);
        Self { per_seed, mean, std }
    }

    pub fn consistent(&self, tol: f64) -> bool {
        let (mean, std) = mean_std(&self.per_seed);
        (mean - self.mean).abs() <= tol && (std - self.std).abs() <= tol
    }
}

/// Sample mean and standard deviation (ddof 1; zero when n < 2).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
