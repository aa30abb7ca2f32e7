use oodlab::dgp::{sample_lattice, sample_uniform, BoxRegion, DgpSpec, WindowTag};
use oodlab::models::{fit_mlp_vector, LrSchedule, MlpConfig, MlpFeatures};
use oodlab::numerics::{RandomStream, Vector};
use oodlab::transforms::FeatureMapSpec;

fn r2(pred: &[f64], truth: &[f64]) -> f64 {
    let n = truth.len() as f64;
    let mean = truth.iter().sum::<f64>() / n;
    let sse: f64 = pred
        .iter()
        .zip(truth)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    let sst: f64 = truth.iter().map(|t| (t - mean) * (t - mean)).sum();
    1.0 - sse / sst
}

fn main() {
    let dim = 4;
    let period = 2.0 * std::f64::consts::PI;
    let spec = DgpSpec::TorusOrderInteraction { dim, order: 4 };
    let region = BoxRegion::cube(dim, 0.0, period);
    let m: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5);

    let mut stream = RandomStream::substream(0, "probe-lattice");
    let train = if std::env::var("UNIFORM").is_ok() {
        let n = m.pow(dim as u32);
        sample_uniform(&spec, &region, n, 0.0, &mut stream, WindowTag::Train).unwrap()
    } else {
        sample_lattice(&spec, &region, m, 0.0, &mut stream, WindowTag::Train).unwrap()
    };
    println!("train points: {}", train.len());
    let feats = FeatureMapSpec::TorusSinCos.apply(&train.inputs).unwrap();
    let y = Vector::from_slice(&train.y()).unwrap();

    let mut eval_stream = RandomStream::substream(0, "probe-eval");
    let id = sample_uniform(&spec, &region, 1024, 0.0, &mut eval_stream, WindowTag::IdTest).unwrap();
    let ood_region = BoxRegion::cube(dim, period, 2.0 * period);
    let ood =
        sample_uniform(&spec, &ood_region, 1024, 0.0, &mut eval_stream, WindowTag::IdTest).unwrap();
    let id_feats = FeatureMapSpec::TorusSinCos.apply(&id.inputs).unwrap();
    let ood_feats = FeatureMapSpec::TorusSinCos.apply(&ood.inputs).unwrap();

    for seed in [0u64, 1, 2] {
        let config = MlpConfig {
            hidden_layers: vec![256],
            epochs: 2000,
            learning_rate: 1e-3,
            schedule: LrSchedule::CosineDecay,
            weight_decay: 1.0,
            features: MlpFeatures::StandardizedRaw,
            seed,
        };
        let t0 = std::time::Instant::now();
        let fit = fit_mlp_vector(&feats, &y, &config).unwrap();
        let id_pred = fit.predict_vector(&id_feats).unwrap().to_vec();
        let ood_pred = fit.predict_vector(&ood_feats).unwrap().to_vec();
        println!(
            "m={m} seed={seed} train_mse={:.5} id_r2={:.4} ood_r2={:.4} [{:.1}s]",
            fit.final_loss,
            r2(&id_pred, &id.y()),
            r2(&ood_pred, &ood.y()),
            t0.elapsed().as_secs_f64()
        );
    }
}
