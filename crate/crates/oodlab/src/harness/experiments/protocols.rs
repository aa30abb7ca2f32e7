//! Model-selection protocols and the sparse-dynamics diagnostic battery.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::diagnostics::{
    cv_select, delta_battery, near_boundary_select, standard_battery, CandidateCommitment,
    CandidateModel, SelectionTally,
};
use crate::dgp::{sample_grid, DgpSpec, Interval, WindowTag};
use crate::models::{fit_ols, predict_original_scale};
use crate::numerics::{RandomStream, Vector};
use crate::transforms::{FeatureMapSpec, LabelMapSpec};

use super::super::config::ExperimentConfig;
use super::super::record::CellRecord;
use super::super::HarnessError;
use super::{relative_error_pct, run_over_seeds, CellBuilder, EvalSet};

fn selection_candidates(count: usize) -> Vec<CandidateCommitment> {
    let mut all = vec![
        CandidateCommitment::ols(
            "fourier",
            FeatureMapSpec::Fourier { harmonics: 1 },
            LabelMapSpec::Identity,
        ),
        CandidateCommitment::ols(
            "poly7",
            FeatureMapSpec::Poly { degree: 7 },
            LabelMapSpec::Identity,
        ),
        CandidateCommitment::ols(
            "poly9",
            FeatureMapSpec::Poly { degree: 9 },
            LabelMapSpec::Identity,
        ),
        CandidateCommitment::ols("raw", FeatureMapSpec::Raw, LabelMapSpec::Identity),
    ];
    all.truncate(count.clamp(1, all.len()));
    all
}

/// Refits a chosen linear candidate on the training window and scores it on
/// the held-out window in the original scale.
fn chosen_ood_error(
    candidates: &[CandidateCommitment],
    chosen: &str,
    train: &crate::dgp::Dataset,
    ood_eval: &EvalSet,
) -> Result<f64, HarnessError> {
    let candidate = candidates
        .iter()
        .find(|c| c.name == chosen)
        .expect("chosen name comes from this candidate list");
    match &candidate.model {
        CandidateModel::Ols => {
            let feats = candidate.feature_spec.apply(&train.inputs)?;
            let z = candidate.label_spec.apply(&train.y())?;
            let fit = fit_ols(&feats, &Vector::from_slice(&z.values)?)?;
            let eval_feats = candidate.feature_spec.apply(&ood_eval.inputs)?;
            let pred = predict_original_scale(&fit, &candidate.label_spec, &eval_feats)?;
            Ok(relative_error_pct(&pred, &ood_eval.truth)?)
        }
        other => Err(HarnessError::InvalidConfig {
            context: format!("chosen-model scoring only covers ols candidates, got {other:?}"),
        }),
    }
}

struct ProtocolOutcome {
    fractions: BTreeMap<String, f64>,
    counts: BTreeMap<String, usize>,
    chosen_ood_mean: Option<f64>,
}

/// Runs `trials` independent noise draws through one selection protocol.
#[allow(clippy::too_many_arguments)]
fn run_protocol(
    use_near_boundary: bool,
    candidates: &[CandidateCommitment],
    spec: &DgpSpec,
    geometry: &SelectionGeometry,
    sigma: f64,
    trials: usize,
    folds: usize,
    stream: &mut RandomStream,
    ood_eval: Option<&EvalSet>,
) -> Result<ProtocolOutcome, HarnessError> {
    let mut tally = SelectionTally::default();
    let mut ood_errors = Vec::new();
    for _ in 0..trials {
        let train = sample_grid(
            spec,
            geometry.train,
            geometry.n_train,
            sigma,
            stream,
            WindowTag::Train,
        )?;
        let outcome = if use_near_boundary {
            let val = sample_grid(
                spec,
                geometry.val,
                geometry.n_val,
                sigma,
                stream,
                WindowTag::NearBoundary,
            )?;
            near_boundary_select(candidates, &train, &val)?
        } else {
            cv_select(candidates, &train, folds, stream)?
        };
        if let Some(eval) = ood_eval {
            ood_errors.push(chosen_ood_error(candidates, &outcome.chosen, &train, eval)?);
        }
        tally.record(&outcome);
    }
    let mut fractions = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for candidate in candidates {
        fractions.insert(
            candidate.name.clone(),
            tally.fraction(&candidate.name) * 100.0,
        );
        counts.insert(candidate.name.clone(), tally.count(&candidate.name));
    }
    let chosen_ood_mean = if ood_errors.is_empty() {
        None
    } else {
        Some(ood_errors.iter().sum::<f64>() / ood_errors.len() as f64)
    };
    Ok(ProtocolOutcome {
        fractions,
        counts,
        chosen_ood_mean,
    })
}

struct SelectionGeometry {
    train: Interval,
    val: Interval,
    n_train: usize,
    n_val: usize,
}

fn selection_cells(
    config: &ExperimentConfig,
    condition: &str,
    sigma: f64,
    trials: usize,
    folds: usize,
    candidates: &[CandidateCommitment],
    geometry: &SelectionGeometry,
    ood_eval: Option<&EvalSet>,
    cells: &mut Vec<CellRecord>,
) {
    let spec = DgpSpec::Sin { freq: 1.0 };
    for (arm, use_nb) in [("near-boundary", true), ("cv", false)] {
        let mut pooled: BTreeMap<String, usize> = BTreeMap::new();
        let mut cell = run_over_seeds(condition, arm, &config.seeds, |b, seed| {
            let label = format!("{}-{arm}", condition);
            let mut stream = RandomStream::substream(seed, &label);
            let outcome = run_protocol(
                use_nb, candidates, &spec, geometry, sigma, trials, folds, &mut stream, ood_eval,
            )?;
            for (name, pct) in &outcome.fractions {
                b.push(&format!("{name}_pct"), *pct);
            }
            for (name, count) in &outcome.counts {
                *pooled.entry(name.clone()).or_default() += count;
            }
            if let Some(err) = outcome.chosen_ood_mean {
                b.push("chosen_ood_pct", err);
            }
            Ok(())
        });
        cell.push_extra("pooled_counts", &pooled);
        cell.push_extra("trials_per_seed", &trials);
        cell.push_extra("sigma", &sigma);
        cells.push(cell);
    }
}

/// Near-boundary vs k-fold cross-validation selection on a periodic target,
/// repeated over independent noise draws.
pub fn exp31(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n_train = r.usize("n_train", 200)?;
    let n_val = r.usize("n_val", 100)?;
    let n_ood = r.usize("n_ood", 200)?;
    let sigma = r.f64("sigma", 1e-2)?;
    let trials = r.usize("trials", 100)?;
    let folds = r.usize("folds", 5)?;
    let candidates = selection_candidates(r.usize("candidates", 4)?);

    let geometry = SelectionGeometry {
        train: Interval::new(-PI, 0.0),
        val: Interval::new(0.0, PI),
        n_train,
        n_val,
    };
    let spec = DgpSpec::Sin { freq: 1.0 };
    let ood_eval = EvalSet::grid(&spec, PI, 3.0 * PI, n_ood);

    let mut cells = Vec::new();
    selection_cells(
        config,
        "sin",
        sigma,
        trials,
        folds,
        &candidates,
        &geometry,
        Some(&ood_eval),
        &mut cells,
    );
    Ok(cells)
}

/// The same selection contest across a noise sweep; only the tallies are
/// recorded.
pub fn exp31_sigma_sweep(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n_train = r.usize("n_train", 200)?;
    let n_val = r.usize("n_val", 100)?;
    let trials = r.usize("trials", 100)?;
    let folds = r.usize("folds", 5)?;
    let candidates = selection_candidates(r.usize("candidates", 4)?);
    let sigmas = r.f64_list(
        "sigmas",
        &[0.0, 1e-2, 1e-1, 3e-1, 1.0, 3.0, 10.0, 30.0],
    )?;

    let geometry = SelectionGeometry {
        train: Interval::new(-PI, 0.0),
        val: Interval::new(0.0, PI),
        n_train,
        n_val,
    };

    let mut cells = Vec::new();
    for sigma in sigmas {
        let condition = format!("sigma={sigma}");
        selection_cells(
            config,
            &condition,
            sigma,
            trials,
            folds,
            &candidates,
            &geometry,
            None,
            &mut cells,
        );
    }
    Ok(cells)
}

/// Full diagnostic battery. Every row is sampled on clean deterministic
/// grids, so the battery runs once regardless of the seed list.
pub fn exp32_battery(_config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let rows = standard_battery();
    let outcome = delta_battery(&rows)?;

    let mut cells = Vec::new();
    for row in &outcome.rows {
        let (condition, arm) = row
            .name
            .split_once('/')
            .unwrap_or((row.name.as_str(), "diagnostic"));
        let mut b = CellBuilder::new(condition, arm);
        b.push("delta_train", row.report.delta_train);
        b.push("delta_ood", row.report.delta_ood);
        b.push("k_active", row.report.k_active as f64);
        b.extra("correct", &row.correct);
        cells.push(b.finish());
    }
    for (name, reason) in &outcome.excluded {
        let (condition, arm) = name
            .split_once('/')
            .unwrap_or((name.as_str(), "diagnostic"));
        cells.push(CellRecord::failed(condition, arm, reason.clone()));
    }

    let mut summary = CellBuilder::new("battery", "spearman");
    summary.push("rho", outcome.spearman.rho);
    if let Some(p) = outcome.spearman.p_value {
        summary.push("p_value", p);
    }
    summary.extra("n_scored", &outcome.rows.len());
    summary.extra("n_excluded", &outcome.excluded.len());
    cells.push(summary.finish());
    Ok(cells)
}
