//! Periodic fields on the d-torus: representation, coverage, and noise.
//!
//! Out-of-window evaluation shifts every coordinate one full period, so a
//! periodic representation sees identical features while raw coordinates
//! land far outside the training range.

use std::f64::consts::PI;

use crate::dgp::{sample_lattice, sample_uniform, BoxRegion, Dataset, DgpSpec, WindowTag};
use crate::models::{fit_mlp_vector, LrSchedule, MlpFeatures, MlpFit};
use crate::numerics::{Matrix, RandomStream, Vector};
use crate::transforms::FeatureMapSpec;

use super::super::config::ExperimentConfig;
use super::super::record::CellRecord;
use super::super::HarnessError;
use super::{push_window, run_over_seeds, score_window, CellBuilder, EvalSet, MlpPlan};

const PERIOD: f64 = 2.0 * PI;

#[derive(Clone, Copy, PartialEq)]
enum TorusArm {
    Raw,
    Exact,
    LearnedFourier,
}

impl TorusArm {
    fn name(&self) -> &'static str {
        match self {
            TorusArm::Raw => "raw",
            TorusArm::Exact => "exact",
            TorusArm::LearnedFourier => "learned-fourier",
        }
    }
}

fn uniform_rows(stream: &mut RandomStream, n: usize, dim: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| stream.uniform(lo, hi)).collect())
        .collect()
}

struct TorusEvals {
    id: EvalSet,
    ood: EvalSet,
}

/// Fresh uniform in-window points plus the same draw shifted one period.
fn torus_evals(spec: &DgpSpec, dim: usize, n_ood: usize, seed: u64, label: &str) -> TorusEvals {
    let mut stream = RandomStream::substream(seed, label);
    let id_rows = uniform_rows(&mut stream, n_ood, dim, 0.0, PERIOD);
    let ood_rows = uniform_rows(&mut stream, n_ood, dim, PERIOD, 2.0 * PERIOD);
    TorusEvals {
        id: EvalSet::from_inputs(spec, id_rows),
        ood: EvalSet::from_inputs(spec, ood_rows),
    }
}

fn fit_torus_arm(
    arm: TorusArm,
    train: &Dataset,
    plan: &MlpPlan,
    seed: u64,
) -> Result<MlpFit, HarnessError> {
    let (features, mlp_features) = match arm {
        TorusArm::Raw => (train.inputs.clone(), MlpFeatures::StandardizedRaw),
        TorusArm::Exact => (
            FeatureMapSpec::TorusSinCos.apply(&train.inputs)?,
            MlpFeatures::StandardizedRaw,
        ),
        TorusArm::LearnedFourier => (
            train.inputs.clone(),
            MlpFeatures::learned_fourier_default(),
        ),
    };
    let y = Vector::from_slice(&train.y())?;
    Ok(fit_mlp_vector(&features, &y, &plan.config(mlp_features, seed))?)
}

fn arm_features(arm: TorusArm, inputs: &Matrix) -> Result<Matrix, HarnessError> {
    match arm {
        TorusArm::Exact => Ok(FeatureMapSpec::TorusSinCos.apply(inputs)?),
        _ => Ok(inputs.clone()),
    }
}

fn score_torus_arm(
    builder: &mut CellBuilder,
    arm: TorusArm,
    fit: &MlpFit,
    evals: &TorusEvals,
) -> Result<(), HarnessError> {
    for (prefix, eval) in [("id", &evals.id), ("ood", &evals.ood)] {
        let feats = arm_features(arm, &eval.inputs)?;
        let pred = fit.predict_vector(&feats)?.to_vec();
        push_window(builder, prefix, &score_window(&pred, &eval.truth)?);
    }
    Ok(())
}

/// Interaction field at increasing dimension, uniform training coverage.
pub fn exp4a(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let desk_dims: &[usize] = if config.full_fidelity {
        &[1, 2, 4, 6, 8, 12]
    } else {
        &[1, 2, 4]
    };
    let dims = r.usize_list("dims", desk_dims)?;
    let mix = r.f64("mix", 0.35)?;
    let n = r.usize("n", 4096)?;
    let n_ood = r.usize("n_ood", 1024)?;
    let plan = MlpPlan::resolve(config, (&[48, 48], 500, 1e-2))?;

    let mut cells = Vec::new();
    for &dim in &dims {
        let spec = DgpSpec::TorusInteraction { dim, mix };
        let region = BoxRegion::cube(dim, 0.0, PERIOD);
        for arm in [TorusArm::Raw, TorusArm::Exact, TorusArm::LearnedFourier] {
            let condition = format!("d={dim}");
            let train_label = format!("exp4a-{condition}-train");
            let eval_label = format!("exp4a-{condition}-eval");
            cells.push(run_over_seeds(&condition, arm.name(), &config.seeds, |b, seed| {
                let mut stream = RandomStream::substream(seed, &train_label);
                let train =
                    sample_uniform(&spec, &region, n, 0.0, &mut stream, WindowTag::Train)?;
                let fit = fit_torus_arm(arm, &train, &plan, seed)?;
                let evals = torus_evals(&spec, dim, n_ood, seed, &eval_label);
                score_torus_arm(b, arm, &fit, &evals)
            }));
        }
    }
    Ok(cells)
}

/// Lattice coverage sweep at fixed dimension and order: per-axis density M
/// controls whether even the exact representation generalizes.
pub fn exp4b(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let dim = r.usize("dim", 4)?;
    let order = r.usize("order", 4)?;
    let ms = r.usize_list("ms", &[2, 3, 4, 5, 6])?;
    let n_ood = r.usize("n_ood", 1024)?;
    // Lattice training pins a handful of values per axis; strong decay keeps
    // the interpolant smooth between lattice planes.
    let plan = MlpPlan::resolve(config, (&[256], 2000, 1e-3))?
        .with_weight_decay(1.0)
        .with_schedule(LrSchedule::CosineDecay);

    let spec = DgpSpec::TorusOrderInteraction { dim, order };
    let region = BoxRegion::cube(dim, 0.0, PERIOD);

    let mut cells = Vec::new();
    for &m in &ms {
        let condition = format!("M={m}");
        let eval_label = format!("exp4b-{condition}-eval");
        cells.push(run_over_seeds(&condition, "exact", &config.seeds, |b, seed| {
            // The lattice is deterministic; only the network init varies.
            let mut stream = RandomStream::substream(seed, "exp4b-lattice");
            let train = sample_lattice(&spec, &region, m, 0.0, &mut stream, WindowTag::Train)?;
            b.extra("n_train", &train.len());
            let fit = fit_torus_arm(TorusArm::Exact, &train, &plan, seed)?;
            let evals = torus_evals(&spec, dim, n_ood, seed, &eval_label);
            score_torus_arm(b, TorusArm::Exact, &fit, &evals)
        }));
    }
    Ok(cells)
}

/// Interaction order sweep at fixed dimension.
pub fn exp4c(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let dim = r.usize("dim", 4)?;
    let qs = r.usize_list("qs", &[1, 2, 3, 4])?;
    let n = r.usize("n", 2048)?;
    let n_ood = r.usize("n_ood", 1024)?;
    let plan = MlpPlan::resolve(config, (&[64, 64], 800, 1e-2))?;

    let region = BoxRegion::cube(dim, 0.0, PERIOD);
    let mut cells = Vec::new();
    for &q in &qs {
        let spec = DgpSpec::TorusOrderInteraction { dim, order: q };
        for arm in [TorusArm::Raw, TorusArm::Exact] {
            let condition = format!("q={q}");
            let train_label = format!("exp4c-{condition}-train");
            let eval_label = format!("exp4c-{condition}-eval");
            cells.push(run_over_seeds(&condition, arm.name(), &config.seeds, |b, seed| {
                let mut stream = RandomStream::substream(seed, &train_label);
                let train =
                    sample_uniform(&spec, &region, n, 0.0, &mut stream, WindowTag::Train)?;
                let fit = fit_torus_arm(arm, &train, &plan, seed)?;
                let evals = torus_evals(&spec, dim, n_ood, seed, &eval_label);
                score_torus_arm(b, arm, &fit, &evals)
            }));
        }
    }
    Ok(cells)
}

/// Label-noise robustness: noise lives on the training labels only, both
/// evaluation windows stay clean.
pub fn exp4d(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let dim = r.usize("dim", 4)?;
    let mix = r.f64("mix", 0.35)?;
    let desk_sigmas: &[f64] = if config.full_fidelity {
        &[0.0, 1e-2, 1e-1, 3e-1, 1.0, 3.0, 10.0, 30.0]
    } else {
        &[0.0, 3.0]
    };
    let sigmas = r.f64_list("sigmas", desk_sigmas)?;
    let n = r.usize("n", 4096)?;
    let n_ood = r.usize("n_ood", 1024)?;
    // At sigma = 3 the noisy targets span roughly +-10; a constant desk rate
    // leaves full-batch Adam oscillating, so the rate anneals to zero here.
    let plan = MlpPlan::resolve(config, (&[48, 48], 500, 1e-2))?
        .with_schedule(LrSchedule::CosineDecay);

    let spec = DgpSpec::TorusInteraction { dim, mix };
    let region = BoxRegion::cube(dim, 0.0, PERIOD);

    let mut cells = Vec::new();
    for &sigma in &sigmas {
        let condition = format!("sigma={sigma}");
        let train_label = format!("exp4d-{condition}-train");
        let eval_label = format!("exp4d-{condition}-eval");
        for arm in [TorusArm::Raw, TorusArm::Exact, TorusArm::LearnedFourier] {
            cells.push(run_over_seeds(&condition, arm.name(), &config.seeds, |b, seed| {
                let mut stream = RandomStream::substream(seed, &train_label);
                let train =
                    sample_uniform(&spec, &region, n, sigma, &mut stream, WindowTag::Train)?;
                let fit = fit_torus_arm(arm, &train, &plan, seed)?;
                let evals = torus_evals(&spec, dim, n_ood, seed, &eval_label);
                score_torus_arm(b, arm, &fit, &evals)
            }));
        }
    }
    Ok(cells)
}
