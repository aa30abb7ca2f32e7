//! Experiment implementations behind the registry ids.

mod feature_maps;
mod protocols;
mod systems;
mod torus;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::dgp::DgpSpec;
use crate::models::{LrSchedule, MlpConfig};
use crate::numerics::Matrix;

use super::config::{ExperimentConfig, ExperimentId};
use super::metrics::{mape_pct, r_squared, relative_error_pct, rmse, MetricSummary};
use super::record::CellRecord;
use super::HarnessError;

pub fn run_cells(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    match config.id {
        ExperimentId::Exp11 => feature_maps::exp11(config),
        ExperimentId::Exp12 => feature_maps::exp12(config),
        ExperimentId::Exp13 => feature_maps::exp13(config),
        ExperimentId::Exp21 => systems::exp21(config),
        ExperimentId::Exp22 => systems::exp22(config),
        ExperimentId::Exp31 => protocols::exp31(config),
        ExperimentId::Exp31SigmaSweep => protocols::exp31_sigma_sweep(config),
        ExperimentId::Exp32Battery => protocols::exp32_battery(config),
        ExperimentId::Exp4a => torus::exp4a(config),
        ExperimentId::Exp4b => torus::exp4b(config),
        ExperimentId::Exp4c => torus::exp4c(config),
        ExperimentId::Exp4d => torus::exp4d(config),
    }
}

/// Accumulates per-seed metric values for one cell, then freezes them into
/// a `CellRecord`. If any seed of a metric is missing (an undefined
/// companion metric, say elementwise MAPE over a window containing an exact
/// zero target), the whole key is dropped so stored summaries always cover
/// every seed.
pub(crate) struct CellBuilder {
    condition: String,
    arm: String,
    values: BTreeMap<String, Vec<Option<f64>>>,
    extras: BTreeMap<String, serde_json::Value>,
}

impl CellBuilder {
    pub fn new(condition: &str, arm: &str) -> Self {
        Self {
            condition: condition.to_string(),
            arm: arm.to_string(),
            values: BTreeMap::new(),
            extras: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: f64) {
        self.values
            .entry(key.to_string())
            .or_default()
            .push(Some(value));
    }

    pub fn push_optional(&mut self, key: &str, value: Option<f64>) {
        self.values.entry(key.to_string()).or_default().push(value);
    }

    pub fn extra<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).expect("extras are plain data");
        self.extras.insert(key.to_string(), v);
    }

    pub fn finish(self) -> CellRecord {
        let mut cell = CellRecord::new(&self.condition, &self.arm);
        cell.extras = self.extras;
        for (key, values) in self.values {
            if values.iter().all(|v| v.is_some()) {
                let plain: Vec<f64> = values.into_iter().map(|v| v.expect("checked")).collect();
                cell.metrics.insert(key, MetricSummary::from_values(plain));
            }
        }
        cell
    }

    /// Converts a per-seed failure into an inline failed cell.
    pub fn fail(self, error: HarnessError) -> CellRecord {
        CellRecord::failed(&self.condition, &self.arm, error.to_string())
    }
}

/// Runs one cell body per seed, collapsing the first per-seed error into an
/// inline failed cell.
pub(crate) fn run_over_seeds<F>(condition: &str, arm: &str, seeds: &[u64], mut body: F) -> CellRecord
where
    F: FnMut(&mut CellBuilder, u64) -> Result<(), HarnessError>,
{
    let mut builder = CellBuilder::new(condition, arm);
    for &seed in seeds {
        if let Err(e) = body(&mut builder, seed) {
            return builder.fail(e);
        }
    }
    builder.finish()
}

/// Scores of one prediction window. The headline ratio-of-means error and
/// RMSE are always defined for finite data; r-squared and MAPE can be
/// undefined (constant truth, zero targets) and stay `None` then.
pub(crate) struct WindowScores {
    pub pct: f64,
    pub rmse: f64,
    pub r2: Option<f64>,
    pub mape: Option<f64>,
}

pub(crate) fn score_window(pred: &[f64], truth: &[f64]) -> Result<WindowScores, HarnessError> {
    if pred.iter().any(|v| !v.is_finite()) {
        return Err(HarnessError::InvalidConfig {
            context: "non-finite predictions".to_string(),
        });
    }
    Ok(WindowScores {
        pct: relative_error_pct(pred, truth)?,
        rmse: rmse(pred, truth)?,
        r2: r_squared(pred, truth).ok(),
        mape: mape_pct(pred, truth).ok(),
    })
}

/// Pushes a scored window under `prefix_pct`, `prefix_rmse`, `prefix_r2`,
/// and `prefix_mape_pct`.
pub(crate) fn push_window(builder: &mut CellBuilder, prefix: &str, scores: &WindowScores) {
    builder.push(&format!("{prefix}_pct"), scores.pct);
    builder.push(&format!("{prefix}_rmse"), scores.rmse);
    builder.push_optional(&format!("{prefix}_r2"), scores.r2);
    builder.push_optional(&format!("{prefix}_mape_pct"), scores.mape);
}

/// Inputs plus clean targets for an evaluation window.
pub(crate) struct EvalSet {
    pub inputs: Matrix,
    pub truth: Vec<f64>,
}

impl EvalSet {
    pub fn from_inputs(spec: &DgpSpec, rows: Vec<Vec<f64>>) -> Self {
        let truth: Vec<f64> = rows.iter().map(|x| spec.eval(x)[0]).collect();
        let inputs = Matrix::from_rows(&rows).expect("inputs are finite");
        Self { inputs, truth }
    }

    /// Inclusive evenly spaced grid; only for one-dimensional processes.
    pub fn grid(spec: &DgpSpec, lo: f64, hi: f64, n: usize) -> Self {
        assert!(n >= 2 && hi > lo);
        let step = (hi - lo) / (n - 1) as f64;
        let rows: Vec<Vec<f64>> = (0..n).map(|i| vec![lo + i as f64 * step]).collect();
        Self::from_inputs(spec, rows)
    }
}

/// Desk-scale against publication-scale MLP shapes: the publication setup
/// is five tanh layers of 256 at learning rate 1e-3; desk runs shrink the
/// network and raise the learning rate so full-batch Adam still converges
/// within the step budget.
pub(crate) struct MlpPlan {
    pub hidden: Vec<usize>,
    pub epochs: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub schedule: LrSchedule,
}

impl MlpPlan {
    pub fn resolve(
        config: &ExperimentConfig,
        desk: (&[usize], usize, f64),
    ) -> Result<Self, HarnessError> {
        let (hidden_desk, epochs_desk, lr_desk) = desk;
        let (hidden, epochs, lr) = if config.full_fidelity {
            (vec![256; 5], 3000, 1e-3)
        } else {
            (hidden_desk.to_vec(), epochs_desk, lr_desk)
        };
        let r = config.reader();
        Ok(Self {
            hidden: r.usize_list("hidden", &hidden)?,
            epochs: r.usize("epochs", epochs)?,
            lr: r.f64("lr", lr)?,
            weight_decay: 0.0,
            schedule: LrSchedule::Constant,
        })
    }

    pub fn with_weight_decay(mut self, weight_decay: f64) -> Self {
        self.weight_decay = weight_decay;
        self
    }

    pub fn with_schedule(mut self, schedule: LrSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn config(&self, features: crate::models::MlpFeatures, seed: u64) -> MlpConfig {
        MlpConfig {
            hidden_layers: self.hidden.clone(),
            epochs: self.epochs,
            learning_rate: self.lr,
            schedule: self.schedule,
            weight_decay: self.weight_decay,
            features,
            seed,
        }
    }
}
