//! Two-input systems: bilinear vector-field recovery and the orbital
//! period scaling law.

use crate::dgp::{sample_uniform, BoxRegion, Dataset, DgpSpec, WindowTag};
use crate::ingest::{
    load_catalog, split_by_semimajor_axis, synthetic_catalog, CatalogSplit, ColumnMapping,
    DEFAULT_A_CUT, DEFAULT_A_MAX, DEFAULT_VARIABLES,
};
use crate::models::{
    fit_mlp, fit_mlp_vector, fit_ols, fit_stlsq, LinearFit, MlpFeatures, PolynomialLibrary,
    StlsqOptions,
};
use crate::numerics::{Matrix, RandomStream, Vector};
use crate::transforms::{ClampPolicy, FeatureMapSpec, LabelMapSpec};

use super::super::config::ExperimentConfig;
use super::super::record::CellRecord;
use super::super::HarnessError;
use super::{run_over_seeds, score_window, CellBuilder, MlpPlan};

/// Evaluation points with clean multi-component truth, one column per
/// output.
struct VectorEval {
    inputs: Matrix,
    truth: Vec<Vec<f64>>,
}

impl VectorEval {
    fn new(spec: &DgpSpec, rows: Vec<Vec<f64>>) -> Self {
        let m = spec.output_dim();
        let mut truth = vec![Vec::with_capacity(rows.len()); m];
        for x in &rows {
            let y = spec.eval(x);
            for (c, v) in y.into_iter().enumerate() {
                truth[c].push(v);
            }
        }
        Self {
            inputs: Matrix::from_rows(&rows).expect("inputs are finite"),
            truth,
        }
    }
}

/// Scores component columns individually and pooled.
fn push_vector_scores(
    builder: &mut CellBuilder,
    prefix: &str,
    pred: &Matrix,
    eval: &VectorEval,
) -> Result<(), HarnessError> {
    let m = eval.truth.len();
    let mut pooled_pred = Vec::new();
    let mut pooled_truth = Vec::new();
    for c in 0..m {
        let col: Vec<f64> = (0..pred.nrows()).map(|i| pred.get(i, c)).collect();
        let scores = score_window(&col, &eval.truth[c])?;
        builder.push(&format!("{prefix}_pct_y{}", c + 1), scores.pct);
        pooled_pred.extend_from_slice(&col);
        pooled_truth.extend_from_slice(&eval.truth[c]);
    }
    let pooled = score_window(&pooled_pred, &pooled_truth)?;
    builder.push(&format!("{prefix}_pct"), pooled.pct);
    builder.push(&format!("{prefix}_rmse"), pooled.rmse);
    builder.push_optional(&format!("{prefix}_r2"), pooled.r2);
    Ok(())
}

/// Per-component regression design `[x_c, x_1 x_2]`; the constant term is
/// the OLS intercept.
fn mass_action_design(inputs: &Matrix, component: usize) -> Matrix {
    let rows: Vec<Vec<f64>> = (0..inputs.nrows())
        .map(|i| {
            let x = inputs.row(i);
            vec![x[component], x[0] * x[1]]
        })
        .collect();
    Matrix::from_rows(&rows).expect("products of finite inputs are finite")
}

fn predict_components(fits: &[LinearFit], inputs: &Matrix) -> Result<Matrix, HarnessError> {
    let n = inputs.nrows();
    let mut flat = vec![0.0; n * fits.len()];
    for (c, fit) in fits.iter().enumerate() {
        let pred = fit.predict(&mass_action_design(inputs, c))?;
        for i in 0..n {
            flat[i * fits.len() + c] = pred.get(i);
        }
    }
    Ok(Matrix::from_shape_vec(n, fits.len(), flat)?)
}

/// Sampled points inside the outer box but outside the training box.
fn rejection_outside(
    stream: &mut RandomStream,
    n: usize,
    outer: (f64, f64),
    inner: (f64, f64),
) -> Vec<Vec<f64>> {
    let mut rows = Vec::with_capacity(n);
    while rows.len() < n {
        let x1 = stream.uniform(outer.0, outer.1);
        let x2 = stream.uniform(outer.0, outer.1);
        let inside =
            x1 >= inner.0 && x1 <= inner.1 && x2 >= inner.0 && x2 <= inner.1;
        if !inside {
            rows.push(vec![x1, x2]);
        }
    }
    rows
}

/// Mass-action kinetics on a box: the bilinear design recovers the rate
/// constants exactly, a raw-input MLP does not transfer off the training
/// box.
pub fn exp21(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n = r.usize("n", 500)?;
    let n_ood = r.usize("n_ood", 500)?;
    let sigma = r.f64("sigma", 0.0)?;
    let train_lo = r.f64("train_lo", 0.4)?;
    let train_hi = r.f64("train_hi", 1.2)?;
    let box_lo = r.f64("box_lo", 0.0)?;
    let box_hi = r.f64("box_hi", 2.0)?;
    let plan = MlpPlan::resolve(config, (&[96, 96, 96], 1200, 1e-2))?;

    let (feed, decay, rate) = (0.5, 0.1, 1.0);
    let spec = DgpSpec::MassAction { feed, decay, rate };
    let region = BoxRegion::cube(2, train_lo, train_hi);

    let sample_train = |seed: u64| -> Result<Dataset, HarnessError> {
        let mut stream = RandomStream::substream(seed, "exp21-train");
        Ok(sample_uniform(
            &spec,
            &region,
            n,
            sigma,
            &mut stream,
            WindowTag::Train,
        )?)
    };
    let id_eval = |seed: u64| -> VectorEval {
        let mut stream = RandomStream::substream(seed, "exp21-id");
        let rows = (0..n_ood)
            .map(|_| {
                vec![
                    stream.uniform(train_lo, train_hi),
                    stream.uniform(train_lo, train_hi),
                ]
            })
            .collect();
        VectorEval::new(&spec, rows)
    };
    let ood_eval = |seed: u64| -> VectorEval {
        let mut stream = RandomStream::substream(seed, "exp21-ood");
        let rows = rejection_outside(
            &mut stream,
            n_ood,
            (box_lo, box_hi),
            (train_lo, train_hi),
        );
        VectorEval::new(&spec, rows)
    };

    let mut cells = Vec::new();

    cells.push(run_over_seeds("mak", "bilinear/ols", &config.seeds, |b, seed| {
        let train = sample_train(seed)?;
        let mut fits = Vec::new();
        let mut coefficients = Vec::new();
        let mut dev_max = 0.0f64;
        for c in 0..2 {
            let design = mass_action_design(&train.inputs, c);
            let y_c: Vec<f64> = (0..train.len()).map(|i| train.targets.get(i, c)).collect();
            let fit = fit_ols(&design, &Vector::from_slice(&y_c)?)?;
            let coefs = vec![fit.intercept, fit.weights[0], fit.weights[1]];
            for (got, want) in coefs.iter().zip([feed, -decay, -rate]) {
                dev_max = dev_max.max((got - want).abs());
            }
            coefficients.push(coefs);
            fits.push(fit);
        }
        b.push("coef_abs_dev_max", dev_max);
        b.extra("last_coefficients", &coefficients);
        let id = id_eval(seed);
        let ood = ood_eval(seed);
        push_vector_scores(b, "id", &predict_components(&fits, &id.inputs)?, &id)?;
        push_vector_scores(b, "ood", &predict_components(&fits, &ood.inputs)?, &ood)?;
        Ok(())
    }));

    for (arm, feature) in [
        ("raw/mlp", None),
        ("bilinear/mlp", Some(FeatureMapSpec::Bilinear)),
    ] {
        cells.push(run_over_seeds("mak", arm, &config.seeds, |b, seed| {
            let train = sample_train(seed)?;
            let feats = match &feature {
                Some(map) => map.apply(&train.inputs)?,
                None => train.inputs.clone(),
            };
            let fit = fit_mlp(
                &feats,
                &train.targets,
                &plan.config(MlpFeatures::StandardizedRaw, seed),
            )?;
            for (prefix, eval) in [("id", id_eval(seed)), ("ood", ood_eval(seed))] {
                let eval_feats = match &feature {
                    Some(map) => map.apply(&eval.inputs)?,
                    None => eval.inputs.clone(),
                };
                let pred = fit.predict(&eval_feats)?;
                push_vector_scores(b, prefix, &pred, &eval)?;
            }
            Ok(())
        }));
    }
    Ok(cells)
}

/// One split of catalog-shaped data, in the coordinates every arm shares.
struct KeplerData {
    split: CatalogSplit,
}

impl KeplerData {
    fn log_features(inputs: &Matrix) -> Result<Matrix, HarnessError> {
        Ok(FeatureMapSpec::LogX.apply(inputs)?)
    }

    fn train_features(&self) -> Result<Matrix, HarnessError> {
        Self::log_features(&self.split.train.inputs)
    }

    fn ood_features(&self) -> Result<Matrix, HarnessError> {
        Self::log_features(&self.split.ood.inputs)
    }
}

fn kepler_ols_cell(builder: &mut CellBuilder, data: &KeplerData) -> Result<(), HarnessError> {
    let log = LabelMapSpec::Log { policy: ClampPolicy::Clamp };
    let feats = data.train_features()?;
    let z = log.apply(&data.split.train.y())?;
    let fit = fit_ols(&feats, &Vector::from_slice(&z.values)?)?;
    builder.push("exponent_a", fit.weights[0]);
    builder.push("exponent_m", fit.weights[1]);
    builder.push("intercept", fit.intercept);

    for (prefix, dataset, features) in [
        ("id", &data.split.train, feats),
        ("ood", &data.split.ood, data.ood_features()?),
    ] {
        let pred: Vec<f64> = fit.predict(&features)?.to_vec().iter().map(|z| z.exp()).collect();
        let scores = score_window(&pred, &dataset.y())?;
        builder.push(&format!("{prefix}_pct"), scores.pct);
        builder.push(&format!("{prefix}_rmse"), scores.rmse);
        builder.push_optional(&format!("{prefix}_r2"), scores.r2);
    }
    Ok(())
}

/// Degree-one sparse fit on centered log coordinates. Centering removes
/// the constant term from the library so the active set is exactly the two
/// exponents.
fn kepler_sindy_cell(builder: &mut CellBuilder, data: &KeplerData) -> Result<(), HarnessError> {
    let log = LabelMapSpec::Log { policy: ClampPolicy::Clamp };
    let feats = data.train_features()?;
    let z = log.apply(&data.split.train.y())?;
    let n = feats.nrows();
    let mean_col = |m: &Matrix, j: usize| -> f64 {
        (0..m.nrows()).map(|i| m.get(i, j)).sum::<f64>() / m.nrows() as f64
    };
    let mean_a = mean_col(&feats, 0);
    let mean_m = mean_col(&feats, 1);
    let mean_z = z.values.iter().sum::<f64>() / n as f64;

    let center = |m: &Matrix| -> Matrix {
        let rows: Vec<Vec<f64>> = (0..m.nrows())
            .map(|i| vec![m.get(i, 0) - mean_a, m.get(i, 1) - mean_m])
            .collect();
        Matrix::from_rows(&rows).expect("finite")
    };
    let centered = center(&feats);
    let zc: Vec<f64> = z.values.iter().map(|v| v - mean_z).collect();
    let library = PolynomialLibrary::new(1, false, &["la", "lm"]);
    let fit = fit_stlsq(
        &library,
        &centered,
        &Vector::from_slice(&zc)?,
        &StlsqOptions::default(),
    )?;
    builder.push("k_active", fit.k_active as f64);
    builder.push("exponent_a", fit.coefficients[0]);
    builder.push("exponent_m", fit.coefficients[1]);

    for (prefix, dataset, features) in [
        ("id", &data.split.train, feats),
        ("ood", &data.split.ood, data.ood_features()?),
    ] {
        let centered_eval = center(&features);
        let zhat = fit.predict(&centered_eval)?;
        let pred: Vec<f64> = zhat.to_vec().iter().map(|v| (v + mean_z).exp()).collect();
        let scores = score_window(&pred, &dataset.y())?;
        builder.push(&format!("{prefix}_pct"), scores.pct);
        builder.push(&format!("{prefix}_rmse"), scores.rmse);
        builder.push_optional(&format!("{prefix}_r2"), scores.r2);
    }
    Ok(())
}

fn kepler_mlp_cell(
    builder: &mut CellBuilder,
    data: &KeplerData,
    loglog: bool,
    plan: &MlpPlan,
    seed: u64,
) -> Result<(), HarnessError> {
    let log = LabelMapSpec::Log { policy: ClampPolicy::Clamp };
    let (feats, zvals): (Matrix, Vec<f64>) = if loglog {
        (data.train_features()?, log.apply(&data.split.train.y())?.values)
    } else {
        (
            data.split.train.inputs.clone(),
            data.split.train.y(),
        )
    };
    let fit = fit_mlp_vector(
        &feats,
        &Vector::from_slice(&zvals)?,
        &plan.config(MlpFeatures::StandardizedRaw, seed),
    )?;
    for (prefix, dataset) in [("id", &data.split.train), ("ood", &data.split.ood)] {
        let eval_feats = if loglog {
            KeplerData::log_features(&dataset.inputs)?
        } else {
            dataset.inputs.clone()
        };
        let raw_pred = fit.predict_vector(&eval_feats)?;
        let pred: Vec<f64> = if loglog {
            raw_pred.to_vec().iter().map(|v| v.exp()).collect()
        } else {
            raw_pred.to_vec()
        };
        let scores = score_window(&pred, &dataset.y())?;
        builder.push(&format!("{prefix}_pct"), scores.pct);
        builder.push(&format!("{prefix}_rmse"), scores.rmse);
        builder.push_optional(&format!("{prefix}_r2"), scores.r2);
    }
    Ok(())
}

/// Orbital-period scaling law on a real or synthetic catalog, split by
/// semi-major axis. MLP arms are publication-scale extras and only run
/// under the full-fidelity flag.
pub fn exp22(config: &ExperimentConfig) -> Result<Vec<CellRecord>, HarnessError> {
    let r = config.reader();
    let n = r.usize("n", 2362)?;
    let log_sigma = r.f64("log_sigma", 0.05)?;
    let a_cut = r.f64("a_cut", DEFAULT_A_CUT)?;
    let a_max = r.f64("a_max", DEFAULT_A_MAX)?;
    let plan = MlpPlan::resolve(config, (&[96, 96, 96], 1500, 1e-2))?;

    let mut cells = Vec::new();

    let synthetic_split = |seed: u64| -> Result<KeplerData, HarnessError> {
        let mut stream = RandomStream::substream(seed, "exp22-synthetic");
        let table = synthetic_catalog(n, log_sigma, &mut stream);
        let split = split_by_semimajor_axis(&table, a_cut, a_max, &DEFAULT_VARIABLES)?;
        Ok(KeplerData { split })
    };

    cells.push(run_over_seeds("synthetic", "loglog/ols", &config.seeds, |b, seed| {
        let data = synthetic_split(seed)?;
        b.extra(
            "last_split",
            &serde_json::json!({"train": data.split.train.len(), "ood": data.split.ood.len()}),
        );
        kepler_ols_cell(b, &data)
    }));
    cells.push(run_over_seeds("synthetic", "loglog/sindy", &config.seeds, |b, seed| {
        let data = synthetic_split(seed)?;
        kepler_sindy_cell(b, &data)
    }));
    if config.full_fidelity {
        for (arm, loglog) in [("loglog/mlp", true), ("raw/mlp", false)] {
            cells.push(run_over_seeds("synthetic", arm, &config.seeds, |b, seed| {
                let data = synthetic_split(seed)?;
                kepler_mlp_cell(b, &data, loglog, &plan, seed)
            }));
        }
    }

    if let Some(path) = &config.catalog {
        // The catalog is a fixed file: cells are deterministic and run once.
        match load_catalog(path, &ColumnMapping::default())
            .map_err(HarnessError::from)
            .and_then(|table| {
                let split = split_by_semimajor_axis(&table, a_cut, a_max, &DEFAULT_VARIABLES)?;
                Ok(KeplerData { split })
            }) {
            Ok(data) => {
                let split_info = serde_json::json!({
                    "train": data.split.train.len(),
                    "ood": data.split.ood.len(),
                });
                cells.push(run_over_seeds("catalog", "loglog/ols", &[0], |b, _| {
                    b.extra("last_split", &split_info);
                    kepler_ols_cell(b, &data)
                }));
                cells.push(run_over_seeds("catalog", "loglog/sindy", &[0], |b, _| {
                    b.extra("last_split", &split_info);
                    kepler_sindy_cell(b, &data)
                }));
                if config.full_fidelity {
                    for (arm, loglog) in [("loglog/mlp", true), ("raw/mlp", false)] {
                        cells.push(run_over_seeds("catalog", arm, &config.seeds, |b, seed| {
                            kepler_mlp_cell(b, &data, loglog, &plan, seed)
                        }));
                    }
                }
            }
            Err(e) => {
                let msg = e.to_string();
                cells.push(CellRecord::failed("catalog", "loglog/ols", msg.clone()));
                cells.push(CellRecord::failed("catalog", "loglog/sindy", msg));
            }
        }
    }
    Ok(cells)
}
