//! Model classes: ordinary least squares, STLSQ sparse regression, and a
//! from-scratch multilayer perceptron trained with Adam.
//!
//! All three expose `fit_*` constructors returning immutable fitted values
//! that predict deterministically and serialize to JSON for run persistence.

mod linear;
mod mlp;
mod sparse;

pub use linear::{fit_ols, LinearFit};
pub use mlp::{
    fit_mlp, fit_mlp_vector, gradient_check, LrSchedule, MlpConfig, MlpFeatures, MlpFit,
    TrainingLogEntry,
};
pub use sparse::{fit_stlsq, stlsq, PolynomialLibrary, SparseFit, StlsqOptions, StlsqSolution};

use crate::numerics::{Matrix, NumericsError};
use crate::transforms::LabelMapSpec;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    /// Least-squares design lost full rank; context names the features involved.
    #[error("rank-deficient design while fitting {context}")]
    RankDeficient {
        context: String,
        #[source]
        source: NumericsError,
    },
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },
    #[error("{context}: need at least {required} samples, got {actual}")]
    TooFewSamples {
        context: String,
        required: usize,
        actual: usize,
    },
    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Common prediction surface over the three fitted model kinds.
///
/// Single-output models return an n x 1 matrix so multi-output MLPs share
/// the same signature.
pub trait Predictor {
    fn predict_matrix(&self, features: &Matrix) -> Result<Matrix, ModelError>;
}

/// Predicts in transformed coordinates, then maps back through the label map.
///
/// The returned values can overflow to infinity when the inverse label map
/// exponentiates a large prediction; error metrics saturate rather than fail.
pub fn predict_original_scale<P: Predictor>(
    fit: &P,
    label_spec: &LabelMapSpec,
    features: &Matrix,
) -> Result<Vec<f64>, ModelError> {
    let z = fit.predict_matrix(features)?;
    if z.ncols() != 1 {
        return Err(ModelError::DimensionMismatch {
            context: format!(
                "original-scale prediction needs a single output, fit produces {}",
                z.ncols()
            ),
        });
    }
    Ok((0..z.nrows())
        .map(|i| label_spec.invert(z.get(i, 0)))
        .collect())
}
