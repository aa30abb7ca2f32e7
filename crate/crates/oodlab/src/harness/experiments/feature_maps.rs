//! One-dimensional extrapolation grids: feature maps, label maps, and model
//! classes crossed on fixed training and held-out windows.

use std::f64::consts::PI;

use crate::dgp::{sample_grid, Dataset, DgpSpec, Interval, WindowTag};
use crate::models::{
    fit_mlp_vector, fit_ols, fit_stlsq, predict_original_scale, MlpFeatures, PolynomialLibrary,
    StlsqOptions,
};
use crate::numerics::{RandomStream, Vector};
use crate::transforms::{ClampPolicy, FeatureMapSpec, LabelMapSpec};

use super::super::config::ExperimentConfig;
use super::super::record::CellRecord;
use super::super::HarnessError;
use super::{push_window, run_over_seeds, score_window, CellBuilder, EvalSet, MlpPlan};

/// Fits the label-mapped targets with OLS on mapped features and scores
/// both windows in the original label scale.
fn linear_cell(
    builder: &mut CellBuilder,
    train: &Dataset,
    feature: &FeatureMapSpec,
    label: &LabelMapSpec,
    id_eval: &EvalSet,
    ood_eval: &EvalSet,
) -> Result<Vec<f64>, HarnessError> {
    let feats = feature.apply(&train.inputs)?;
    let z = label.apply(&train.y())?;
    let fit = fit_ols(&feats, &Vector::from_slice(&z.values)?)?;

    for (prefix, eval) in [("id", id_eval), ("ood", ood_eval)] {
        let eval_feats = feature.apply(&eval.inputs)?;
        let pred = predict_original_scale(&fit, label, &eval_feats)?;
        push_window(builder, prefix, &score_window(&pred, &eval.truth)?);
    }
    let mut coefficients = vec![fit.intercept];
    coefficients.extend_from_slice(&fit.weights);
    Ok(coefficients)
}

/// STLSQ over a polynomial library in the mapped feature coordinates.
fn sparse_cell(
    builder: &mut CellBuilder,
    train: &Dataset,
    feature: &FeatureMapSpec,
    label: &LabelMapSpec,
    library: &PolynomialLibrary,
    options: &StlsqOptions,
    id_eval: &EvalSet,
    ood_eval: &EvalSet,
) -> Result<(), HarnessError> {
    let feats = feature.apply(&train.inputs)?;
    let z = label.apply(&train.y())?;
    let fit = fit_stlsq(library, &feats, &Vector::from_slice(&z.values)?, options)?;

    for (prefix, eval) in [("id", id_eval), ("ood", ood_eval)] {
        let eval_feats = feature.apply(&eval.inputs)?;
        let pred = predict_original_scale(&fit, label, &eval_feats)?;
        push_window(builder, prefix, &score_window(&pred, &eval.truth)?);
    }
    builder.push("k_active", fit.k_active as f64);
    Ok(())
}

/// MLP on mapped features with label-mapped targets.
#[allow(clippy::too_many_arguments)]
fn mlp_cell(
    builder: &mut CellBuilder,
    train: &Dataset,
    feature: &FeatureMapSpec,
    label: &LabelMapSpec,
    plan: &MlpPlan,
    mlp_features: MlpFeatures,
    seed: u64,
    id_eval: &EvalSet,
    ood_eval: &EvalSet,
) -> Result<(), HarnessError> {
    let feats = feature.apply(&train.inputs)?;
    let z = label.apply(&train.y())?;
    let fit = fit_mlp_vector(
        &feats,
        &Vector::from_slice(&z.values)?,
        &plan.config(mlp_features, seed),
    )?;
    for (prefix, eval) in [("id", id_eval), ("ood", ood_eval)] {
        let eval_feats = feature.apply(&eval.inputs)?;
        let pred = predict_original_scale(&fit, label, &eval_feats)?;
        push_window(builder, prefix, &score_window(&pred, &eval.truth)?);
    }
    Ok(())
}

/// Periodic signal on a clean grid: {raw, fourier} features crossed with
/// {ols, sindy, mlp} model classes, trained on one period and scored one
/// period out.
pub fn exp11(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n = r.usize("n", 128)?;
    let sigma = r.f64("sigma", 0.0)?;
    let n_eval = r.usize("n_eval", 256)?;
    let train_lo = r.f64("train_lo", -PI)?;
    let train_hi = r.f64("train_hi", PI)?;
    let ood_lo = r.f64("ood_lo", PI)?;
    let ood_hi = r.f64("ood_hi", 3.0 * PI)?;
    let plan = MlpPlan::resolve(config, (&[128, 128, 128], 2000, 1e-2))?;

    let spec = DgpSpec::Sin { freq: 1.0 };
    let id_eval = EvalSet::grid(&spec, train_lo, train_hi, n_eval);
    let ood_eval = EvalSet::grid(&spec, ood_lo, ood_hi, n_eval);
    let train_window = Interval::new(train_lo, train_hi);

    let sample_train = |seed: u64| -> Result<Dataset, HarnessError> {
        let mut stream = RandomStream::substream(seed, "exp11-train");
        Ok(sample_grid(
            &spec,
            train_window,
            n,
            sigma,
            &mut stream,
            WindowTag::Train,
        )?)
    };

    let raw = FeatureMapSpec::Raw;
    let fourier = FeatureMapSpec::Fourier { harmonics: 1 };
    let identity = LabelMapSpec::Identity;
    // Tight threshold: the sparse arm should keep a full odd-power series
    // when one is genuinely needed to fit a sine in raw coordinates.
    let sparse_options = StlsqOptions {
        threshold: 1e-6,
        max_iter: 50,
    };

    let mut cells = Vec::new();

    for (feature_name, feature) in [("raw", &raw), ("fourier", &fourier)] {
        cells.push(run_over_seeds(
            "sin",
            &format!("{feature_name}/ols"),
            &config.seeds,
            |b, seed| {
                let train = sample_train(seed)?;
                let coeffs = linear_cell(b, &train, feature, &identity, &id_eval, &ood_eval)?;
                b.extra("last_coefficients", &coeffs);
                Ok(())
            },
        ));

        let library_names: Vec<&str> = match feature {
            FeatureMapSpec::Raw => vec!["x"],
            _ => vec!["s", "c"],
        };
        let library = PolynomialLibrary::new(9, true, &library_names);
        cells.push(run_over_seeds(
            "sin",
            &format!("{feature_name}/sindy"),
            &config.seeds,
            |b, seed| {
                let train = sample_train(seed)?;
                sparse_cell(
                    b,
                    &train,
                    feature,
                    &identity,
                    &library,
                    &sparse_options,
                    &id_eval,
                    &ood_eval,
                )
            },
        ));

        cells.push(run_over_seeds(
            "sin",
            &format!("{feature_name}/mlp"),
            &config.seeds,
            |b, seed| {
                let train = sample_train(seed)?;
                mlp_cell(
                    b,
                    &train,
                    feature,
                    &identity,
                    &plan,
                    MlpFeatures::StandardizedRaw,
                    seed,
                    &id_eval,
                    &ood_eval,
                )
            },
        ));
    }
    Ok(cells)
}

/// Growth-curve ambiguity: a square law and an exponential that agree to
/// within noise on the training window, pulled apart by the label map the
/// learner commits to.
pub fn exp12(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n = r.usize("n", 150)?;
    let sigma = r.f64("sigma", 0.2)?;
    let n_test = r.usize("n_test", 300)?;
    let train_lo = r.f64("train_lo", 1.0)?;
    let train_hi = r.f64("train_hi", 2.0)?;
    let ood_lo = r.f64("ood_lo", 2.0)?;
    let ood_hi = r.f64("ood_hi", 10.0)?;
    let plan = MlpPlan::resolve(config, (&[128, 128, 128], 1500, 1e-2))?;

    // exp(2 ln 2 (x - 1)) written as scale * exp(rate x).
    let rate = 2.0 * std::f64::consts::LN_2;
    let processes = [
        ("p1", DgpSpec::Polynomial { coeffs: vec![0.0, 0.0, 1.0] }),
        ("p2", DgpSpec::Exponential { scale: (-rate).exp(), rate }),
    ];

    let log = LabelMapSpec::Log { policy: ClampPolicy::Clamp };
    let loglog = FeatureMapSpec::LogX;
    let rawx = FeatureMapSpec::Raw;
    let library = PolynomialLibrary::new(1, true, &["u"]);
    let sparse_options = StlsqOptions::default();

    let mut cells = Vec::new();
    for (name, spec) in &processes {
        let id_eval = EvalSet::grid(spec, train_lo, train_hi, n_test);
        let ood_eval = EvalSet::grid(spec, ood_lo, ood_hi, n_test);
        let train_window = Interval::new(train_lo, train_hi);
        let label = format!("exp12-{name}");
        let sample_train = |seed: u64| -> Result<Dataset, HarnessError> {
            let mut stream = RandomStream::substream(seed, &label);
            Ok(sample_grid(
                spec,
                train_window,
                n,
                sigma,
                &mut stream,
                WindowTag::Train,
            )?)
        };

        cells.push(run_over_seeds(name, "loglog/ols", &config.seeds, |b, seed| {
            let train = sample_train(seed)?;
            let coeffs = linear_cell(b, &train, &loglog, &log, &id_eval, &ood_eval)?;
            b.extra("last_coefficients", &coeffs);
            Ok(())
        }));
        cells.push(run_over_seeds(name, "logy/ols", &config.seeds, |b, seed| {
            let train = sample_train(seed)?;
            let coeffs = linear_cell(b, &train, &rawx, &log, &id_eval, &ood_eval)?;
            b.extra("last_coefficients", &coeffs);
            Ok(())
        }));
        cells.push(run_over_seeds(name, "loglog/sindy", &config.seeds, |b, seed| {
            let train = sample_train(seed)?;
            sparse_cell(
                b,
                &train,
                &loglog,
                &log,
                &library,
                &sparse_options,
                &id_eval,
                &ood_eval,
            )
        }));
        cells.push(run_over_seeds(name, "loglog/mlp", &config.seeds, |b, seed| {
            let train = sample_train(seed)?;
            mlp_cell(
                b,
                &train,
                &loglog,
                &log,
                &plan,
                MlpFeatures::StandardizedRaw,
                seed,
                &id_eval,
                &ood_eval,
            )
        }));
    }
    Ok(cells)
}

/// Incomplete basis: a two-harmonic feature map cannot span the target
/// linearly, but a nonlinear model class on the same periodic features can
/// still compose it, and then extrapolates.
pub fn exp13(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n = r.usize("n", 200)?;
    let sigma = r.f64("sigma", 0.0)?;
    let n_eval = r.usize("n_eval", 300)?;
    let ood_lo = r.f64("ood_lo", 2.0 * PI)?;
    let ood_hi = r.f64("ood_hi", 4.0 * PI)?;
    let plan = MlpPlan::resolve(config, (&[128, 128, 128], 2000, 1e-2))?;

    let spec = DgpSpec::HarmonicProduct;
    let id_eval = EvalSet::grid(&spec, -PI, PI, n_eval);
    let ood_eval = EvalSet::grid(&spec, ood_lo, ood_hi, n_eval);
    let fourier2 = FeatureMapSpec::Fourier { harmonics: 2 };
    let identity = LabelMapSpec::Identity;

    let sample_train = |seed: u64| -> Result<Dataset, HarnessError> {
        let mut stream = RandomStream::substream(seed, "exp13-train");
        Ok(sample_grid(
            &spec,
            Interval::new(-PI, PI),
            n,
            sigma,
            &mut stream,
            WindowTag::Train,
        )?)
    };

    let mut cells = Vec::new();
    cells.push(run_over_seeds("g1", "fourier2/ols", &config.seeds, |b, seed| {
        let train = sample_train(seed)?;
        let coeffs = linear_cell(b, &train, &fourier2, &identity, &id_eval, &ood_eval)?;
        b.extra("last_coefficients", &coeffs);
        Ok(())
    }));
    cells.push(run_over_seeds("g1", "fourier2/mlp", &config.seeds, |b, seed| {
        let train = sample_train(seed)?;
        mlp_cell(
            b,
            &train,
            &fourier2,
            &identity,
            &plan,
            MlpFeatures::StandardizedRaw,
            seed,
            &id_eval,
            &ood_eval,
        )
    }));
    Ok(cells)
}
