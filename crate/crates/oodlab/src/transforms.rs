//! Feature maps and label maps.
//!
//! A model commitment in this laboratory is a triple: a feature map applied
//! to raw inputs, a label map applied to targets, and a model class fit in
//! the transformed space. This module owns the first two. Feature maps are
//! deterministic column constructions on an input matrix; label maps are
//! invertible scalar transforms so predictions can be mapped back to the
//! original scale for honest error reporting.
//!
//! Both spec types have compact text forms (`"fourier:k=2"`, `"log"`) used in
//! run configurations and result records.

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::numerics::Matrix;

/// Labels at or below zero are clamped to this floor before taking logs,
/// under `ClampPolicy::Clamp`.
pub const LOG_FLOOR: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum TransformError {
    #[error("feature map {spec} expects input dimension {expected}, got {actual}")]
    InputDimension {
        spec: String,
        expected: usize,
        actual: usize,
    },
    #[error("label at row {row} is {value}, outside the domain of a log map")]
    NonPositiveLabel { row: usize, value: f64 },
    #[error("feature map {spec} has trainable parameters and cannot be applied statically")]
    NotStatic { spec: String },
    #[error("feature map produced a non-finite value at row {row}")]
    NonFiniteFeature { row: usize },
    #[error("unrecognized transform spec {text:?}")]
    UnknownSpec { text: String },
}

// ---------------------------------------------------------------------------
// Feature maps
// ---------------------------------------------------------------------------

/// A deterministic map from raw inputs to model features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FeatureMapSpec {
    /// Identity: the raw coordinates.
    Raw,
    /// `[sin x, cos x, sin 2x, cos 2x, ...]` up to `harmonics`, on a scalar
    /// input. `harmonics = 1` yields two columns.
    Fourier { harmonics: usize },
    /// `[x, x^2, ..., x^degree]`, no constant column, on a scalar input.
    Poly { degree: usize },
    /// Elementwise natural log, for power-law structure.
    LogX,
    /// Elementwise `e^{-x}`, for saturating exponential structure.
    NegExp,
    /// `[1, x_1, x_2, x_1 x_2]` on a two-dimensional input. Carries its own
    /// constant column, so pair it with a no-intercept fit.
    Bilinear,
    /// `[sin t_1, cos t_1, ..., sin t_d, cos t_d]`: the canonical embedding
    /// of each torus coordinate.
    TorusSinCos,
    /// Per-coordinate `[sin(w_j x_j), cos(w_j x_j)]` with frequencies learned
    /// jointly with the network; `log_lo..log_hi` bounds the log-uniform
    /// initialization of `ln w_j`. Only a network fit can materialize this
    /// map, so `apply` refuses it.
    LearnedFourier { log_lo: f64, log_hi: f64 },
}

impl FeatureMapSpec {
    /// Learned-frequency features with the default `ln w ~ U[ln 0.1, ln 10]`
    /// initialization window.
    pub fn learned_fourier_default() -> Self {
        FeatureMapSpec::LearnedFourier {
            log_lo: 0.1f64.ln(),
            log_hi: 10.0f64.ln(),
        }
    }

    /// Number of feature columns produced for an `input_dim`-dimensional
    /// input.
    pub fn output_dim(&self, input_dim: usize) -> usize {
        match self {
            FeatureMapSpec::Raw | FeatureMapSpec::LogX | FeatureMapSpec::NegExp => input_dim,
            FeatureMapSpec::Fourier { harmonics } => 2 * harmonics,
            FeatureMapSpec::Poly { degree } => *degree,
            FeatureMapSpec::Bilinear => 4,
            FeatureMapSpec::TorusSinCos | FeatureMapSpec::LearnedFourier { .. } => 2 * input_dim,
        }
    }

    /// Required input dimension, if the map constrains it.
    fn required_dim(&self) -> Option<usize> {
        match self {
            FeatureMapSpec::Fourier { .. } | FeatureMapSpec::Poly { .. } => Some(1),
            FeatureMapSpec::Bilinear => Some(2),
            _ => None,
        }
    }

    /// Applies the map to every row of `inputs`.
    pub fn apply(&self, inputs: &Matrix) -> Result<Matrix, TransformError> {
        if let FeatureMapSpec::LearnedFourier { .. } = self {
            return Err(TransformError::NotStatic {
                spec: self.to_string(),
            });
        }
        let d = inputs.ncols();
        if let Some(required) = self.required_dim() {
            if d != required {
                return Err(TransformError::InputDimension {
                    spec: self.to_string(),
                    expected: required,
                    actual: d,
                });
            }
        }
        let n = inputs.nrows();
        let mut rows = Vec::with_capacity(n);
        for i in 0..n {
            let x = inputs.row(i);
            let feats: Vec<f64> = match self {
                FeatureMapSpec::Raw => x.clone(),
                FeatureMapSpec::Fourier { harmonics } => (1..=*harmonics)
                    .flat_map(|k| {
                        let kx = k as f64 * x[0];
                        [kx.sin(), kx.cos()]
                    })
                    .collect(),
                FeatureMapSpec::Poly { degree } => {
                    let mut cols = Vec::with_capacity(*degree);
                    let mut p = 1.0;
                    for _ in 0..*degree {
                        p *= x[0];
                        cols.push(p);
                    }
                    cols
                }
                FeatureMapSpec::LogX => x.iter().map(|v| v.ln()).collect(),
                FeatureMapSpec::NegExp => x.iter().map(|v| (-v).exp()).collect(),
                FeatureMapSpec::Bilinear => vec![1.0, x[0], x[1], x[0] * x[1]],
                FeatureMapSpec::TorusSinCos => {
                    x.iter().flat_map(|t| [t.sin(), t.cos()]).collect()
                }
                FeatureMapSpec::LearnedFourier { .. } => unreachable!("rejected above"),
            };
            if feats.iter().any(|v| !v.is_finite()) {
                return Err(TransformError::NonFiniteFeature { row: i });
            }
            rows.push(feats);
        }
        Ok(Matrix::from_rows(&rows).expect("features validated finite"))
    }
}

impl std::fmt::Display for FeatureMapSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeatureMapSpec::Raw => write!(f, "raw"),
            FeatureMapSpec::Fourier { harmonics } => write!(f, "fourier:k={harmonics}"),
            FeatureMapSpec::Poly { degree } => write!(f, "poly:d={degree}"),
            FeatureMapSpec::LogX => write!(f, "logx"),
            FeatureMapSpec::NegExp => write!(f, "negexp"),
            FeatureMapSpec::Bilinear => write!(f, "bilinear"),
            FeatureMapSpec::TorusSinCos => write!(f, "torus-sincos"),
            FeatureMapSpec::LearnedFourier { log_lo, log_hi } => {
                write!(f, "learned-fourier:log_lo={log_lo},log_hi={log_hi}")
            }
        }
    }
}

impl FromStr for FeatureMapSpec {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let unknown = || TransformError::UnknownSpec {
            text: s.to_string(),
        };
        let (head, args) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        match (head, args) {
            ("raw", None) => Ok(FeatureMapSpec::Raw),
            ("logx", None) => Ok(FeatureMapSpec::LogX),
            ("negexp", None) => Ok(FeatureMapSpec::NegExp),
            ("bilinear", None) => Ok(FeatureMapSpec::Bilinear),
            ("torus-sincos", None) => Ok(FeatureMapSpec::TorusSinCos),
            ("learned-fourier", None) => Ok(FeatureMapSpec::learned_fourier_default()),
            ("fourier", Some(a)) => {
                let harmonics = a
                    .strip_prefix("k=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&k| k >= 1)
                    .ok_or_else(unknown)?;
                Ok(FeatureMapSpec::Fourier { harmonics })
            }
            ("poly", Some(a)) => {
                let degree = a
                    .strip_prefix("d=")
                    .and_then(|v| v.parse::<usize>().ok())
                    .filter(|&d| d >= 1)
                    .ok_or_else(unknown)?;
                Ok(FeatureMapSpec::Poly { degree })
            }
            ("learned-fourier", Some(a)) => {
                let mut log_lo = None;
                let mut log_hi = None;
                for part in a.split(',') {
                    match part.split_once('=') {
                        Some(("log_lo", v)) => log_lo = v.parse::<f64>().ok(),
                        Some(("log_hi", v)) => log_hi = v.parse::<f64>().ok(),
                        _ => return Err(unknown()),
                    }
                }
                match (log_lo, log_hi) {
                    (Some(log_lo), Some(log_hi)) => {
                        Ok(FeatureMapSpec::LearnedFourier { log_lo, log_hi })
                    }
                    _ => Err(unknown()),
                }
            }
            _ => Err(unknown()),
        }
    }
}

/// Per-component design for a bilinear vector field: row `[1, x_c, x_1 x_2]`
/// where `c` is the zero-based output component. Fit one such design per
/// component to read off the feed, decay, and interaction coefficients
/// directly.
pub fn bilinear_design(inputs: &Matrix, component: usize) -> Result<Matrix, TransformError> {
    if inputs.ncols() != 2 {
        return Err(TransformError::InputDimension {
            spec: "bilinear-design".to_string(),
            expected: 2,
            actual: inputs.ncols(),
        });
    }
    assert!(component < 2, "bilinear field has two components");
    let rows: Vec<Vec<f64>> = (0..inputs.nrows())
        .map(|i| {
            let x = inputs.row(i);
            vec![1.0, x[component], x[0] * x[1]]
        })
        .collect();
    Ok(Matrix::from_rows(&rows).expect("products of finite inputs are finite"))
}

// ---------------------------------------------------------------------------
// Label maps
// ---------------------------------------------------------------------------

/// What to do with labels outside the domain of a log map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampPolicy {
    /// Clamp to `LOG_FLOOR` and count the clamp.
    Clamp,
    /// Fail the transform.
    Reject,
}

/// An invertible scalar transform applied to targets before fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LabelMapSpec {
    Identity,
    /// Natural log. Non-positive labels are handled per `policy`.
    Log { policy: ClampPolicy },
    /// `ln(y + epsilon)`, defined for `y > -epsilon`.
    LogOffset { epsilon: f64 },
}

/// Transformed labels plus how many were clamped to stay in domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedLabels {
    pub values: Vec<f64>,
    pub clamped: usize,
}

impl LabelMapSpec {
    pub fn apply(&self, y: &[f64]) -> Result<TransformedLabels, TransformError> {
        let mut clamped = 0;
        let mut values = Vec::with_capacity(y.len());
        for (row, &v) in y.iter().enumerate() {
            let t = match self {
                LabelMapSpec::Identity => v,
                LabelMapSpec::Log { policy } => {
                    if v > 0.0 {
                        v.ln()
                    } else {
                        match policy {
                            ClampPolicy::Clamp => {
                                clamped += 1;
                                LOG_FLOOR.ln()
                            }
                            ClampPolicy::Reject => {
                                return Err(TransformError::NonPositiveLabel { row, value: v })
                            }
                        }
                    }
                }
                LabelMapSpec::LogOffset { epsilon } => {
                    let shifted = v + epsilon;
                    if shifted <= 0.0 {
                        return Err(TransformError::NonPositiveLabel { row, value: v });
                    }
                    shifted.ln()
                }
            };
            values.push(t);
        }
        Ok(TransformedLabels { values, clamped })
    }

    /// Maps a prediction in transformed space back to the original scale.
    pub fn invert(&self, z: f64) -> f64 {
        match self {
            LabelMapSpec::Identity => z,
            LabelMapSpec::Log { .. } => z.exp(),
            LabelMapSpec::LogOffset { epsilon } => z.exp() - epsilon,
        }
    }
}

impl std::fmt::Display for LabelMapSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelMapSpec::Identity => write!(f, "identity"),
            LabelMapSpec::Log {
                policy: ClampPolicy::Clamp,
            } => write!(f, "log"),
            LabelMapSpec::Log {
                policy: ClampPolicy::Reject,
            } => write!(f, "log:reject"),
            LabelMapSpec::LogOffset { epsilon } => write!(f, "log-offset:eps={epsilon}"),
        }
    }
}

impl FromStr for LabelMapSpec {
    type Err = TransformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "identity" => Ok(LabelMapSpec::Identity),
            "log" => Ok(LabelMapSpec::Log {
                policy: ClampPolicy::Clamp,
            }),
            "log:reject" => Ok(LabelMapSpec::Log {
                policy: ClampPolicy::Reject,
            }),
            _ => {
                if let Some(rest) = s.strip_prefix("log-offset:eps=") {
                    if let Ok(epsilon) = rest.parse::<f64>() {
                        return Ok(LabelMapSpec::LogOffset { epsilon });
                    }
                }
                Err(TransformError::UnknownSpec {
                    text: s.to_string(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_column(xs: &[f64]) -> Matrix {
        Matrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn fourier_columns_interleave_ascending_harmonics() {
        let inputs = single_column(&[0.7]);
        let f = FeatureMapSpec::Fourier { harmonics: 2 }.apply(&inputs).unwrap();
        assert_eq!(f.ncols(), 4);
        assert_abs_diff_eq!(f.get(0, 0), 0.7f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.get(0, 1), 0.7f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.get(0, 2), 1.4f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.get(0, 3), 1.4f64.cos(), epsilon = 1e-15);
    }

    #[test]
    fn poly_has_no_constant_column() {
        let inputs = single_column(&[2.0]);
        let f = FeatureMapSpec::Poly { degree: 3 }.apply(&inputs).unwrap();
        assert_eq!(f.row(0), vec![2.0, 4.0, 8.0]);
    }

    #[test]
    fn bilinear_design_example() {
        let inputs = Matrix::from_rows(&[vec![2.0, 3.0]]).unwrap();
        let shared = FeatureMapSpec::Bilinear.apply(&inputs).unwrap();
        assert_eq!(shared.row(0), vec![1.0, 2.0, 3.0, 6.0]);
        let comp0 = bilinear_design(&inputs, 0).unwrap();
        assert_eq!(comp0.row(0), vec![1.0, 2.0, 6.0]);
        let comp1 = bilinear_design(&inputs, 1).unwrap();
        assert_eq!(comp1.row(0), vec![1.0, 3.0, 6.0]);
    }

    #[test]
    fn torus_embedding_interleaves_per_coordinate() {
        let inputs = Matrix::from_rows(&[vec![0.3, 1.2]]).unwrap();
        let f = FeatureMapSpec::TorusSinCos.apply(&inputs).unwrap();
        assert_eq!(
            f.row(0),
            vec![0.3f64.sin(), 0.3f64.cos(), 1.2f64.sin(), 1.2f64.cos()]
        );
    }

    #[test]
    fn negexp_and_logx_are_elementwise() {
        let inputs = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        let f = FeatureMapSpec::NegExp.apply(&inputs).unwrap();
        assert_abs_diff_eq!(f.get(0, 0), (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(f.get(0, 1), (-2.0f64).exp(), epsilon = 1e-15);
        let g = FeatureMapSpec::LogX.apply(&inputs).unwrap();
        assert_abs_diff_eq!(g.get(0, 1), 2.0f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn logx_outside_domain_is_an_error() {
        let inputs = single_column(&[-1.0]);
        match FeatureMapSpec::LogX.apply(&inputs) {
            Err(TransformError::NonFiniteFeature { row: 0 }) => {}
            other => panic!("expected NonFiniteFeature, got {other:?}"),
        }
    }

    #[test]
    fn learned_fourier_cannot_be_applied_statically() {
        let inputs = single_column(&[1.0]);
        match FeatureMapSpec::learned_fourier_default().apply(&inputs) {
            Err(TransformError::NotStatic { .. }) => {}
            other => panic!("expected NotStatic, got {other:?}"),
        }
    }

    #[test]
    fn fourier_rejects_multidimensional_input() {
        let inputs = Matrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        match (FeatureMapSpec::Fourier { harmonics: 1 }).apply(&inputs) {
            Err(TransformError::InputDimension { expected: 1, actual: 2, .. }) => {}
            other => panic!("expected InputDimension, got {other:?}"),
        }
    }

    #[test]
    fn output_dims() {
        assert_eq!(FeatureMapSpec::Raw.output_dim(3), 3);
        assert_eq!(FeatureMapSpec::Fourier { harmonics: 3 }.output_dim(1), 6);
        assert_eq!(FeatureMapSpec::Poly { degree: 9 }.output_dim(1), 9);
        assert_eq!(FeatureMapSpec::Bilinear.output_dim(2), 4);
        assert_eq!(FeatureMapSpec::TorusSinCos.output_dim(5), 10);
    }

    #[test]
    fn log_label_map_clamps_and_counts() {
        let spec = LabelMapSpec::Log {
            policy: ClampPolicy::Clamp,
        };
        let out = spec.apply(&[1.0, std::f64::consts::E, 0.0, -5.0]).unwrap();
        assert_abs_diff_eq!(out.values[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.values[1], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out.values[2], LOG_FLOOR.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(out.values[3], LOG_FLOOR.ln(), epsilon = 1e-12);
        assert_eq!(out.clamped, 2);

        let strict = LabelMapSpec::Log {
            policy: ClampPolicy::Reject,
        };
        match strict.apply(&[1.0, 0.0]) {
            Err(TransformError::NonPositiveLabel { row: 1, .. }) => {}
            other => panic!("expected NonPositiveLabel, got {other:?}"),
        }
    }

    #[test]
    fn label_maps_invert() {
        let log = LabelMapSpec::Log {
            policy: ClampPolicy::Clamp,
        };
        let off = LabelMapSpec::LogOffset { epsilon: 1e-3 };
        for &y in &[0.5, 1.0, 17.0] {
            let z = log.apply(&[y]).unwrap().values[0];
            assert_abs_diff_eq!(log.invert(z), y, epsilon = 1e-12);
            let z = off.apply(&[y]).unwrap().values[0];
            assert_abs_diff_eq!(off.invert(z), y, epsilon = 1e-12);
        }
    }

    #[test]
    fn text_forms_round_trip() {
        let feature_specs = [
            FeatureMapSpec::Raw,
            FeatureMapSpec::Fourier { harmonics: 2 },
            FeatureMapSpec::Poly { degree: 7 },
            FeatureMapSpec::LogX,
            FeatureMapSpec::NegExp,
            FeatureMapSpec::Bilinear,
            FeatureMapSpec::TorusSinCos,
            FeatureMapSpec::learned_fourier_default(),
        ];
        for spec in feature_specs {
            let text = spec.to_string();
            let back: FeatureMapSpec = text.parse().unwrap();
            assert_eq!(spec, back, "round trip through {text:?}");
        }
        let label_specs = [
            LabelMapSpec::Identity,
            LabelMapSpec::Log {
                policy: ClampPolicy::Clamp,
            },
            LabelMapSpec::Log {
                policy: ClampPolicy::Reject,
            },
            LabelMapSpec::LogOffset { epsilon: 1e-6 },
        ];
        for spec in label_specs {
            let text = spec.to_string();
            let back: LabelMapSpec = text.parse().unwrap();
            assert_eq!(spec, back, "round trip through {text:?}");
        }
    }

    #[test]
    fn rejects_malformed_text() {
        assert!("fourier".parse::<FeatureMapSpec>().is_err());
        assert!("fourier:k=0".parse::<FeatureMapSpec>().is_err());
        assert!("poly:d=-1".parse::<FeatureMapSpec>().is_err());
        assert!("sqrt".parse::<FeatureMapSpec>().is_err());
        assert!("log:maybe".parse::<LabelMapSpec>().is_err());
    }
}
