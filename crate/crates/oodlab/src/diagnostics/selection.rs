//! Model selection between committed coordinate systems.
//!
//! Both selectors fit every candidate in its own coordinates and compare
//! validation error in the original label scale, so commitments with
//! different label maps stay comparable. They differ only in where the
//! validation labels come from: a held-out window just past the training
//! boundary, or shuffled folds inside it.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::dgp::Dataset;
use crate::models::{
    fit_mlp_vector, fit_ols, fit_stlsq, predict_original_scale, MlpConfig, PolynomialLibrary,
    StlsqOptions,
};
use crate::numerics::{Matrix, RandomStream, Vector};
use crate::transforms::{FeatureMapSpec, LabelMapSpec};

/// Model class fitted inside a candidate commitment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateModel {
    Ols,
    Stlsq {
        degree: usize,
        include_bias: bool,
        threshold: f64,
        max_iter: usize,
    },
    Mlp(MlpConfig),
}

/// A named commitment: feature map, label map, and model class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateCommitment {
    pub name: String,
    pub feature_spec: FeatureMapSpec,
    pub label_spec: LabelMapSpec,
    pub model: CandidateModel,
}

impl CandidateCommitment {
    pub fn ols(name: &str, feature_spec: FeatureMapSpec, label_spec: LabelMapSpec) -> Self {
        Self {
            name: name.to_string(),
            feature_spec,
            label_spec,
            model: CandidateModel::Ols,
        }
    }
}

/// Validation score of one candidate; exactly one of `score` and `failure`
/// is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateScore {
    pub name: String,
    pub score: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionOutcome {
    /// Name of the candidate with the lowest score; ties keep declaration
    /// order.
    pub chosen: String,
    pub scores: Vec<CandidateScore>,
}

/// Selection counts across repeated trials.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SelectionTally {
    counts: Vec<(String, usize)>,
    total: usize,
}

impl SelectionTally {
    pub fn record(&mut self, outcome: &SelectionOutcome) {
        self.total += 1;
        if let Some(entry) = self.counts.iter_mut().find(|(n, _)| *n == outcome.chosen) {
            entry.1 += 1;
        } else {
            self.counts.push((outcome.chosen.clone(), 1));
        }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, name: &str) -> usize {
        self.counts
            .iter()
            .find(|(n, _)| n == name)
            .map_or(0, |(_, c)| *c)
    }

    pub fn fraction(&self, name: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(name) as f64 / self.total as f64
        }
    }

    /// (name, count) pairs in first-seen order.
    pub fn entries(&self) -> &[(String, usize)] {
        &self.counts
    }
}

/// Hinge construction witnessing the sharpness of the near-boundary idea:
/// two processes agreeing to within `epsilon` on the training window can
/// diverge at slope `r` beyond it, so the extrapolation gap first exceeds
/// `epsilon` exactly `critical_delta` past the boundary.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundaryGeometry {
    pub epsilon: f64,
    pub r: f64,
}

impl BoundaryGeometry {
    pub fn new(epsilon: f64, r: f64) -> Self {
        assert!(epsilon > 0.0 && r > 0.0, "hinge geometry needs positive parameters");
        Self { epsilon, r }
    }

    pub fn critical_delta(&self) -> f64 {
        self.epsilon / self.r
    }

    /// max(0, r (x - boundary)), the divergent branch.
    pub fn hinge(&self, boundary: f64) -> impl Fn(f64) -> f64 {
        let r = self.r;
        move |x| (r * (x - boundary)).max(0.0)
    }

    /// Sup of the hinge over a window reaching `delta` past the boundary.
    pub fn sup_gap(&self, delta: f64) -> f64 {
        (self.r * delta).max(0.0)
    }
}

/// Fits every candidate on the training window and scores it just past the
/// training boundary.
///
/// The validation window's interior must be disjoint from the training
/// range; sharing an endpoint is fine. All-candidate failure is an error,
/// individual failures are recorded and skipped.
pub fn near_boundary_select(
    candidates: &[CandidateCommitment],
    train: &Dataset,
    val: &Dataset,
) -> Result<SelectionOutcome, DiagnosticsError> {
    check_scalar_window("train", train)?;
    check_scalar_window("validation", val)?;
    let (train_lo, train_hi) = range(&train.x());
    let (val_lo, val_hi) = range(&val.x());
    if val_lo < train_hi && val_hi > train_lo {
        return Err(DiagnosticsError::DomainViolation {
            context: format!(
                "validation range [{val_lo}, {val_hi}] overlaps training range \
                 [{train_lo}, {train_hi}]"
            ),
        });
    }
    let scores = candidates
        .iter()
        .map(|c| score_candidate(c, &train.inputs, &train.y(), &val.inputs, &val.y()))
        .collect();
    pick(candidates, scores)
}

/// Scores every candidate by k-fold cross-validation inside the training
/// window: mean held-out MSE in the original label scale over shuffled
/// contiguous folds.
pub fn cv_select(
    candidates: &[CandidateCommitment],
    train: &Dataset,
    folds: usize,
    stream: &mut RandomStream,
) -> Result<SelectionOutcome, DiagnosticsError> {
    check_scalar_window("train", train)?;
    let n = train.len();
    if folds < 2 || n < folds {
        return Err(DiagnosticsError::DomainViolation {
            context: format!("{folds}-fold split of {n} samples is not valid"),
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    stream.shuffle(&mut order);
    let mut bounds = Vec::with_capacity(folds + 1);
    bounds.push(0);
    for k in 1..=folds {
        bounds.push(k * n / folds);
    }

    let y = train.y();
    let scores = candidates
        .iter()
        .map(|c| {
            let mut total = 0.0;
            for k in 0..folds {
                let held: Vec<usize> = order[bounds[k]..bounds[k + 1]].to_vec();
                let kept: Vec<usize> = order[..bounds[k]]
                    .iter()
                    .chain(&order[bounds[k + 1]..])
                    .copied()
                    .collect();
                let fit_x = train.inputs.select_rows(&kept);
                let fit_y: Vec<f64> = kept.iter().map(|&i| y[i]).collect();
                let val_x = train.inputs.select_rows(&held);
                let val_y: Vec<f64> = held.iter().map(|&i| y[i]).collect();
                match score_candidate(c, &fit_x, &fit_y, &val_x, &val_y) {
                    Ok(mse) => total += mse,
                    Err(failure) => return Err(failure),
                }
            }
            Ok(total / folds as f64)
        })
        .collect();
    pick(candidates, scores)
}

fn check_scalar_window(name: &str, data: &Dataset) -> Result<(), DiagnosticsError> {
    if data.is_empty() || data.inputs.ncols() != 1 || data.targets.ncols() != 1 {
        return Err(DiagnosticsError::DomainViolation {
            context: format!("{name} window must be nonempty with scalar input and target"),
        });
    }
    Ok(())
}

fn range(xs: &[f64]) -> (f64, f64) {
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Fits one candidate and returns its validation MSE in the original label
/// scale, or a failure description.
fn score_candidate(
    candidate: &CandidateCommitment,
    train_x: &Matrix,
    train_y: &[f64],
    val_x: &Matrix,
    val_y: &[f64],
) -> Result<f64, String> {
    let describe = |stage: &str, err: &dyn std::fmt::Display| format!("{stage}: {err}");

    let features = candidate
        .feature_spec
        .apply(train_x)
        .map_err(|e| describe("feature map", &e))?;
    let labels = candidate
        .label_spec
        .apply(train_y)
        .map_err(|e| describe("label map", &e))?;
    let z = Vector::from_slice(&labels.values).map_err(|e| describe("label map", &e))?;
    let val_features = candidate
        .feature_spec
        .apply(val_x)
        .map_err(|e| describe("feature map", &e))?;

    let preds = match &candidate.model {
        CandidateModel::Ols => {
            let fit = fit_ols(&features, &z).map_err(|e| describe("fit", &e))?;
            predict_original_scale(&fit, &candidate.label_spec, &val_features)
        }
        CandidateModel::Stlsq {
            degree,
            include_bias,
            threshold,
            max_iter,
        } => {
            let names: Vec<String> = (1..=features.ncols()).map(|j| format!("f{j}")).collect();
            let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let library = PolynomialLibrary::new(*degree, *include_bias, &name_refs);
            let options = StlsqOptions {
                threshold: *threshold,
                max_iter: *max_iter,
            };
            let fit = fit_stlsq(&library, &features, &z, &options)
                .map_err(|e| describe("fit", &e))?;
            predict_original_scale(&fit, &candidate.label_spec, &val_features)
        }
        CandidateModel::Mlp(config) => {
            let fit = fit_mlp_vector(&features, &z, config).map_err(|e| describe("fit", &e))?;
            predict_original_scale(&fit, &candidate.label_spec, &val_features)
        }
    }
    .map_err(|e| describe("predict", &e))?;

    let mse = preds
        .iter()
        .zip(val_y)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / val_y.len() as f64;
    if mse.is_finite() {
        Ok(mse)
    } else {
        Err("non-finite validation score".to_string())
    }
}

fn pick(
    candidates: &[CandidateCommitment],
    results: Vec<Result<f64, String>>,
) -> Result<SelectionOutcome, DiagnosticsError> {
    let mut scores = Vec::with_capacity(candidates.len());
    let mut best: Option<(usize, f64)> = None;
    let mut first_failure: Option<String> = None;
    for (i, (candidate, result)) in candidates.iter().zip(results).enumerate() {
        match result {
            Ok(mse) => {
                if best.map_or(true, |(_, b)| mse < b) {
                    best = Some((i, mse));
                }
                scores.push(CandidateScore {
                    name: candidate.name.clone(),
                    score: Some(mse),
                    failure: None,
                });
            }
            Err(failure) => {
                if first_failure.is_none() {
                    first_failure = Some(format!("{}: {failure}", candidate.name));
                }
                scores.push(CandidateScore {
                    name: candidate.name.clone(),
                    score: None,
                    failure: Some(failure),
                });
            }
        }
    }
    match best {
        Some((i, _)) => Ok(SelectionOutcome {
            chosen: candidates[i].name.clone(),
            scores,
        }),
        None => Err(DiagnosticsError::AllCandidatesFailed {
            first: first_failure.unwrap_or_else(|| "no candidates".to_string()),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{sample_grid, DgpSpec, Interval, WindowTag};

    fn sine_window(lo: f64, hi: f64, n: usize, sigma: f64, seed: u64, tag: WindowTag) -> Dataset {
        let mut stream = RandomStream::substream(seed, "selection-test");
        sample_grid(
            &DgpSpec::Sin { freq: 1.0 },
            Interval::new(lo, hi),
            n,
            sigma,
            &mut stream,
            tag,
        )
        .unwrap()
    }

    fn sine_candidates() -> Vec<CandidateCommitment> {
        vec![
            CandidateCommitment::ols(
                "fourier",
                FeatureMapSpec::Fourier { harmonics: 1 },
                LabelMapSpec::Identity,
            ),
            CandidateCommitment::ols("poly7", FeatureMapSpec::Poly { degree: 7 }, LabelMapSpec::Identity),
            CandidateCommitment::ols("raw", FeatureMapSpec::Raw, LabelMapSpec::Identity),
        ]
    }

    #[test]
    fn boundary_window_prefers_harmonic_coordinates() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.0, 200, 0.01, 1, WindowTag::Train);
        let val = sine_window(0.0, pi, 100, 0.01, 2, WindowTag::NearBoundary);
        let outcome = near_boundary_select(&sine_candidates(), &train, &val).unwrap();
        assert_eq!(outcome.chosen, "fourier");
        assert_eq!(outcome.scores.len(), 3);
        assert!(outcome.scores.iter().all(|s| s.score.is_some()));
    }

    #[test]
    fn overlapping_validation_window_is_rejected() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.5, 100, 0.01, 3, WindowTag::Train);
        let val = sine_window(0.0, pi, 50, 0.01, 4, WindowTag::NearBoundary);
        let err = near_boundary_select(&sine_candidates(), &train, &val).unwrap_err();
        assert!(matches!(err, DiagnosticsError::DomainViolation { .. }));
    }

    #[test]
    fn shared_endpoint_is_allowed() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.0, 100, 0.01, 5, WindowTag::Train);
        let val = sine_window(0.0, pi, 50, 0.01, 6, WindowTag::NearBoundary);
        assert!(near_boundary_select(&sine_candidates(), &train, &val).is_ok());
    }

    #[test]
    fn failed_candidate_is_recorded_and_skipped() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.0, 100, 0.01, 7, WindowTag::Train);
        let val = sine_window(0.0, pi, 50, 0.01, 8, WindowTag::NearBoundary);
        let mut candidates = sine_candidates();
        // Log labels reject the sine's negative values outright.
        candidates.insert(
            0,
            CandidateCommitment::ols(
                "log-labels",
                FeatureMapSpec::Raw,
                LabelMapSpec::Log {
                    policy: crate::transforms::ClampPolicy::Reject,
                },
            ),
        );
        let outcome = near_boundary_select(&candidates, &train, &val).unwrap();
        assert_eq!(outcome.chosen, "fourier");
        let failed = &outcome.scores[0];
        assert!(failed.score.is_none());
        assert!(failed.failure.as_deref().unwrap().contains("label map"));
    }

    #[test]
    fn all_candidates_failing_is_an_error() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.0, 100, 0.01, 9, WindowTag::Train);
        let val = sine_window(0.0, pi, 50, 0.01, 10, WindowTag::NearBoundary);
        let candidates = vec![CandidateCommitment::ols(
            "log-labels",
            FeatureMapSpec::Raw,
            LabelMapSpec::Log {
                policy: crate::transforms::ClampPolicy::Reject,
            },
        )];
        let err = near_boundary_select(&candidates, &train, &val).unwrap_err();
        assert!(matches!(err, DiagnosticsError::AllCandidatesFailed { .. }));
    }

    #[test]
    fn cross_validation_runs_and_scores_every_candidate() {
        let pi = std::f64::consts::PI;
        let train = sine_window(-pi, 0.0, 120, 0.05, 11, WindowTag::Train);
        let mut stream = RandomStream::substream(12, "cv");
        let outcome = cv_select(&sine_candidates(), &train, 5, &mut stream).unwrap();
        assert_eq!(outcome.scores.len(), 3);
        assert!(outcome.scores.iter().all(|s| s.score.is_some()));
        // Inside a half period the sine is well fit by several classes; the
        // raw line is not one of them.
        assert_ne!(outcome.chosen, "raw");
    }

    #[test]
    fn tally_tracks_fractions() {
        let mut tally = SelectionTally::default();
        let outcome = SelectionOutcome {
            chosen: "fourier".to_string(),
            scores: vec![],
        };
        tally.record(&outcome);
        tally.record(&outcome);
        let other = SelectionOutcome {
            chosen: "raw".to_string(),
            scores: vec![],
        };
        tally.record(&other);
        assert_eq!(tally.total(), 3);
        assert_eq!(tally.count("fourier"), 2);
        assert!((tally.fraction("fourier") - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(tally.count("poly7"), 0);
    }

    #[test]
    fn hinge_gap_crosses_epsilon_at_the_critical_offset() {
        let geometry = BoundaryGeometry::new(0.05, 2.5);
        let delta = geometry.critical_delta();
        assert!(geometry.sup_gap(0.99 * delta) < geometry.epsilon);
        assert!(geometry.sup_gap(delta) >= geometry.epsilon);
        let hinge = geometry.hinge(1.0);
        assert_eq!(hinge(0.5), 0.0);
        assert!((hinge(1.0 + delta) - geometry.epsilon).abs() < 1e-12);
    }
}
