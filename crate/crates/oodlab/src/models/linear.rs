//! Ordinary least squares on an explicit feature matrix.

use serde::{Deserialize, Serialize};

use super::{ModelError, Predictor};
use crate::numerics::{solve_least_squares, Matrix, NumericsError, Vector};
use crate::transforms::{FeatureMapSpec, LabelMapSpec};

/// OLS fit with an always-present intercept.
///
/// `train_rms_residual` is the root-mean-square residual on the training
/// sample at fit time; re-predicting the training inputs reproduces it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearFit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub feature_spec: Option<FeatureMapSpec>,
    pub label_spec: Option<LabelMapSpec>,
    pub train_rms_residual: f64,
}

impl LinearFit {
    pub fn with_specs(mut self, feature_spec: FeatureMapSpec, label_spec: LabelMapSpec) -> Self {
        self.feature_spec = Some(feature_spec);
        self.label_spec = Some(label_spec);
        self
    }

    pub fn predict(&self, features: &Matrix) -> Result<Vector, ModelError> {
        if features.ncols() != self.weights.len() {
            return Err(ModelError::DimensionMismatch {
                context: format!(
                    "linear fit has {} weights, features have {} columns",
                    self.weights.len(),
                    features.ncols()
                ),
            });
        }
        let w = Vector::from_slice(&self.weights).expect("fit weights are finite");
        let mut out = features.matvec(&w)?.into_array();
        out += self.intercept;
        Ok(Vector::from_array(out)?)
    }
}

impl Predictor for LinearFit {
    fn predict_matrix(&self, features: &Matrix) -> Result<Matrix, ModelError> {
        let v = self.predict(features)?;
        let n = v.len();
        Matrix::from_shape_vec(n, 1, v.to_vec()).map_err(ModelError::from)
    }
}

/// Least-squares fit of `z` on `[1 | features]`.
pub fn fit_ols(features: &Matrix, z: &Vector) -> Result<LinearFit, ModelError> {
    let n = features.nrows();
    let p = features.ncols();
    if z.len() != n {
        return Err(ModelError::DimensionMismatch {
            context: format!("{n} feature rows but {} targets", z.len()),
        });
    }
    if n < p + 1 {
        return Err(ModelError::TooFewSamples {
            context: format!("OLS with {p} features plus intercept"),
            required: p + 1,
            actual: n,
        });
    }
    let ones = Matrix::from_shape_vec(n, 1, vec![1.0; n])?;
    let design = ones.hstack(features)?;
    let solution = solve_least_squares(&design, z).map_err(|e| match e {
        NumericsError::RankDeficient { .. } => ModelError::RankDeficient {
            context: format!("intercept-augmented design with {p} feature columns"),
            source: e,
        },
        other => ModelError::from(other),
    })?;
    let coeffs = solution.to_vec();
    let fit = LinearFit {
        weights: coeffs[1..].to_vec(),
        intercept: coeffs[0],
        feature_spec: None,
        label_spec: None,
        train_rms_residual: 0.0,
    };
    let predictions = fit.predict(features)?;
    let mut sse = 0.0;
    for i in 0..n {
        let r = predictions.get(i) - z.get(i);
        sse += r * r;
    }
    Ok(LinearFit {
        train_rms_residual: (sse / n as f64).sqrt(),
        ..fit
    })
}
