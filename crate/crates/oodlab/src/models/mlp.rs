//! From-scratch multilayer perceptron trained by full-batch Adam on MSE.
//!
//! The stack is tanh hidden layers with a linear output head. Inputs are
//! standardized with train-set statistics, except in the learned-Fourier
//! variant where a trainable front layer maps each raw coordinate x_j to
//! (sin(w_j x_j), cos(w_j x_j)) with trainable log-frequency log w_j.

use ndarray::{Array1, Array2, Axis, Zip};
use serde::{Deserialize, Serialize};

use super::{ModelError, Predictor};
use crate::numerics::{Matrix, RandomStream, Vector};

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MlpFeatures {
    /// Standardize each input column with train-set mean and std.
    StandardizedRaw,
    /// Trainable per-coordinate sin/cos front layer on the raw inputs.
    /// Log-frequencies initialize uniformly on [log_lo, log_hi].
    LearnedFourier { log_lo: f64, log_hi: f64 },
}

impl MlpFeatures {
    pub fn learned_fourier_default() -> Self {
        Self::LearnedFourier {
            log_lo: 0.1f64.ln(),
            log_hi: 10.0f64.ln(),
        }
    }
}

/// Per-epoch learning-rate rule applied on top of `learning_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum LrSchedule {
    #[default]
    Constant,
    /// Cosine ramp from the base rate at epoch 1 down to zero at the last epoch.
    CosineDecay,
}

impl LrSchedule {
    fn rate(self, base: f64, epoch: usize, total: usize) -> f64 {
        match self {
            Self::Constant => base,
            Self::CosineDecay => {
                let t = (epoch - 1) as f64 / total.max(1) as f64;
                base * 0.5 * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden_layers: Vec<usize>,
    pub epochs: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub schedule: LrSchedule,
    /// Decoupled per-step decay on weight matrices; biases and the learned
    /// front layer are exempt.
    #[serde(default)]
    pub weight_decay: f64,
    pub features: MlpFeatures,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_layers: vec![256; 5],
            epochs: 3000,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 0,
        }
    }
}

/// Loss trace entry; `loss` is the running minimum MSE up to `epoch`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainingLogEntry {
    pub epoch: usize,
    pub loss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Layer {
    w: Array2<f64>,
    b: Array1<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Network {
    log_freq: Option<Array1<f64>>,
    layers: Vec<Layer>,
}

struct ForwardPass {
    front: Array2<f64>,
    hidden: Vec<Array2<f64>>,
    output: Array2<f64>,
}

struct Gradients {
    d_log_freq: Option<Array1<f64>>,
    d_layers: Vec<(Array2<f64>, Array1<f64>)>,
}

impl Network {
    fn init(input_dim: usize, output_dim: usize, config: &MlpConfig) -> Self {
        let mut stream = RandomStream::substream(config.seed, "mlp-init");
        let log_freq = match config.features {
            MlpFeatures::StandardizedRaw => None,
            MlpFeatures::LearnedFourier { log_lo, log_hi } => Some(Array1::from_iter(
                (0..input_dim).map(|_| stream.uniform(log_lo, log_hi)),
            )),
        };
        let net_input = if log_freq.is_some() {
            2 * input_dim
        } else {
            input_dim
        };
        let mut dims = vec![net_input];
        dims.extend_from_slice(&config.hidden_layers);
        dims.push(output_dim);
        let layers = dims
            .windows(2)
            .map(|pair| {
                let (fan_in, fan_out) = (pair[0], pair[1]);
                let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
                let w = Array2::from_shape_fn((fan_out, fan_in), |_| {
                    stream.uniform(-limit, limit)
                });
                Layer {
                    w,
                    b: Array1::zeros(fan_out),
                }
            })
            .collect();
        Self { log_freq, layers }
    }

    /// `x` is the standardized input in raw mode, the raw angles otherwise.
    fn forward(&self, x: &Array2<f64>) -> ForwardPass {
        let front = match &self.log_freq {
            None => x.clone(),
            Some(rho) => fourier_front(x, rho),
        };
        let last = self.layers.len() - 1;
        let mut hidden: Vec<Array2<f64>> = Vec::with_capacity(last);
        for (l, layer) in self.layers[..last].iter().enumerate() {
            let prev = if l == 0 { &front } else { &hidden[l - 1] };
            let mut z = prev.dot(&layer.w.t());
            z += &layer.b;
            z.mapv_inplace(f64::tanh);
            hidden.push(z);
        }
        let prev = if last == 0 { &front } else { &hidden[last - 1] };
        let out_layer = &self.layers[last];
        let mut output = prev.dot(&out_layer.w.t());
        output += &out_layer.b;
        ForwardPass {
            front,
            hidden,
            output,
        }
    }

    fn mse(&self, x: &Array2<f64>, y: &Array2<f64>) -> f64 {
        let out = self.forward(x).output;
        let n = (y.nrows() * y.ncols()) as f64;
        (&out - y).mapv(|r| r * r).sum() / n
    }

    fn loss_and_gradients(&self, x: &Array2<f64>, y: &Array2<f64>) -> (f64, Gradients) {
        let fwd = self.forward(x);
        let count = (y.nrows() * y.ncols()) as f64;
        let resid = &fwd.output - y;
        let loss = resid.mapv(|r| r * r).sum() / count;

        let last = self.layers.len() - 1;
        let mut d_layers_rev: Vec<(Array2<f64>, Array1<f64>)> = Vec::with_capacity(last + 1);
        let mut delta = resid * (2.0 / count);
        let mut d_front: Option<Array2<f64>> = None;
        for l in (0..=last).rev() {
            let prev = if l == 0 { &fwd.front } else { &fwd.hidden[l - 1] };
            let dw = delta.t().dot(prev);
            let db = delta.sum_axis(Axis(0));
            let d_prev = delta.dot(&self.layers[l].w);
            d_layers_rev.push((dw, db));
            if l == 0 {
                d_front = Some(d_prev);
            } else {
                let h = &fwd.hidden[l - 1];
                delta = d_prev * h.mapv(|v| 1.0 - v * v);
            }
        }
        d_layers_rev.reverse();

        let d_log_freq = self.log_freq.as_ref().map(|rho| {
            let d_front = d_front.as_ref().expect("front gradient exists after backprop");
            let d = rho.len();
            let mut g = Array1::zeros(d);
            for j in 0..d {
                let omega = rho[j].exp();
                let mut acc = 0.0;
                for i in 0..x.nrows() {
                    let xij = x[[i, j]];
                    let arg = omega * xij;
                    acc += d_front[[i, 2 * j]] * xij * omega * arg.cos();
                    acc -= d_front[[i, 2 * j + 1]] * xij * omega * arg.sin();
                }
                g[j] = acc;
            }
            g
        });

        (
            loss,
            Gradients {
                d_log_freq,
                d_layers: d_layers_rev,
            },
        )
    }

    fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        if let Some(rho) = &self.log_freq {
            flat.extend(rho.iter());
        }
        for layer in &self.layers {
            flat.extend(layer.w.iter());
            flat.extend(layer.b.iter());
        }
        flat
    }

    fn set_flat(&mut self, flat: &[f64]) {
        let mut pos = 0;
        if let Some(rho) = &mut self.log_freq {
            for v in rho.iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
        }
        for layer in &mut self.layers {
            for v in layer.w.iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
            for v in layer.b.iter_mut() {
                *v = flat[pos];
                pos += 1;
            }
        }
        debug_assert_eq!(pos, flat.len());
    }
}

impl Gradients {
    fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::new();
        if let Some(g) = &self.d_log_freq {
            flat.extend(g.iter());
        }
        for (dw, db) in &self.d_layers {
            flat.extend(dw.iter());
            flat.extend(db.iter());
        }
        flat
    }
}

fn fourier_front(x: &Array2<f64>, rho: &Array1<f64>) -> Array2<f64> {
    let (n, d) = x.dim();
    let mut out = Array2::zeros((n, 2 * d));
    for i in 0..n {
        for j in 0..d {
            let arg = rho[j].exp() * x[[i, j]];
            out[[i, 2 * j]] = arg.sin();
            out[[i, 2 * j + 1]] = arg.cos();
        }
    }
    out
}

struct AdamState {
    freq: Option<(Array1<f64>, Array1<f64>)>,
    layers: Vec<(Array2<f64>, Array1<f64>, Array2<f64>, Array1<f64>)>,
}

impl AdamState {
    fn zeros_like(net: &Network) -> Self {
        Self {
            freq: net
                .log_freq
                .as_ref()
                .map(|r| (Array1::zeros(r.len()), Array1::zeros(r.len()))),
            layers: net
                .layers
                .iter()
                .map(|l| {
                    (
                        Array2::zeros(l.w.dim()),
                        Array1::zeros(l.b.len()),
                        Array2::zeros(l.w.dim()),
                        Array1::zeros(l.b.len()),
                    )
                })
                .collect(),
        }
    }
}

fn adam_step<D: ndarray::Dimension>(
    param: &mut ndarray::Array<f64, D>,
    grad: &ndarray::Array<f64, D>,
    m: &mut ndarray::Array<f64, D>,
    v: &mut ndarray::Array<f64, D>,
    lr: f64,
    bias1: f64,
    bias2: f64,
) {
    Zip::from(param)
        .and(grad)
        .and(m)
        .and(v)
        .for_each(|p, &g, m, v| {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            let m_hat = *m / bias1;
            let v_hat = *v / bias2;
            *p -= lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
        });
}

/// Fitted MLP; the standardization statistics and learned frequencies are
/// frozen at fit time, so prediction is a pure function of the inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpFit {
    pub config: MlpConfig,
    pub input_dim: usize,
    pub output_dim: usize,
    feature_mean: Array1<f64>,
    feature_std: Array1<f64>,
    network: Network,
    pub training_log: Vec<TrainingLogEntry>,
    pub final_loss: f64,
}

impl MlpFit {
    pub fn predict(&self, features: &Matrix) -> Result<Matrix, ModelError> {
        if features.ncols() != self.input_dim {
            return Err(ModelError::DimensionMismatch {
                context: format!(
                    "MLP fitted on {} inputs, given {}",
                    self.input_dim,
                    features.ncols()
                ),
            });
        }
        let x = (features.array() - &self.feature_mean) / &self.feature_std;
        let out = self.network.forward(&x).output;
        Matrix::from_array(out).map_err(ModelError::from)
    }

    /// Single-output convenience over `predict`.
    pub fn predict_vector(&self, features: &Matrix) -> Result<Vector, ModelError> {
        if self.output_dim != 1 {
            return Err(ModelError::DimensionMismatch {
                context: format!("MLP has {} outputs, expected 1", self.output_dim),
            });
        }
        let out = self.predict(features)?;
        Ok(out.column(0))
    }

    pub fn log_frequencies(&self) -> Option<Vec<f64>> {
        self.network.log_freq.as_ref().map(|r| r.to_vec())
    }
}

impl Predictor for MlpFit {
    fn predict_matrix(&self, features: &Matrix) -> Result<Matrix, ModelError> {
        self.predict(features)
    }
}

/// Per-column mean and std; constant columns get std 1 so standardization
/// stays invertible.
fn standardization(x: &Array2<f64>) -> (Array1<f64>, Array1<f64>) {
    let n = x.nrows() as f64;
    let mean = x.sum_axis(Axis(0)) / n;
    let centered = x - &mean;
    let mut std = (centered.mapv(|v| v * v).sum_axis(Axis(0)) / n).mapv(f64::sqrt);
    std.mapv_inplace(|s| if s < 1e-12 { 1.0 } else { s });
    (mean, std)
}

pub fn fit_mlp(
    features: &Matrix,
    targets: &Matrix,
    config: &MlpConfig,
) -> Result<MlpFit, ModelError> {
    let n = features.nrows();
    if targets.nrows() != n {
        return Err(ModelError::DimensionMismatch {
            context: format!("{n} feature rows but {} target rows", targets.nrows()),
        });
    }
    if n == 0 {
        return Err(ModelError::TooFewSamples {
            context: "MLP training".to_string(),
            required: 1,
            actual: 0,
        });
    }
    assert!(config.epochs >= 1, "epochs must be at least 1");
    assert!(
        config.hidden_layers.iter().all(|&w| w >= 1),
        "hidden widths must be at least 1"
    );

    let (mean, std) = match config.features {
        MlpFeatures::StandardizedRaw => standardization(features.array()),
        MlpFeatures::LearnedFourier { .. } => (
            Array1::zeros(features.ncols()),
            Array1::ones(features.ncols()),
        ),
    };
    let x = (features.array() - &mean) / &std;
    let y = targets.array();

    let mut net = Network::init(features.ncols(), targets.ncols(), config);
    let mut adam = AdamState::zeros_like(&net);
    let stride = (config.epochs / 100).max(1);
    let mut best = f64::INFINITY;
    let mut log = Vec::new();
    for epoch in 1..=config.epochs {
        let (loss, grads) = net.loss_and_gradients(&x, y);
        if !loss.is_finite() {
            return Err(ModelError::NonFiniteLoss { epoch });
        }
        best = best.min(loss);
        if epoch == 1 || epoch % stride == 0 {
            log.push(TrainingLogEntry { epoch, loss: best });
        }
        let bias1 = 1.0 - BETA1.powi(epoch as i32);
        let bias2 = 1.0 - BETA2.powi(epoch as i32);
        let lr = config
            .schedule
            .rate(config.learning_rate, epoch, config.epochs);
        if let (Some(rho), Some(g), Some((m, v))) = (
            net.log_freq.as_mut(),
            grads.d_log_freq.as_ref(),
            adam.freq.as_mut(),
        ) {
            adam_step(rho, g, m, v, lr, bias1, bias2);
        }
        for (layer, ((dw, db), (mw, mb, vw, vb))) in net
            .layers
            .iter_mut()
            .zip(grads.d_layers.iter().zip(adam.layers.iter_mut()))
        {
            adam_step(&mut layer.w, dw, mw, vw, lr, bias1, bias2);
            adam_step(&mut layer.b, db, mb, vb, lr, bias1, bias2);
            if config.weight_decay > 0.0 {
                let keep = 1.0 - lr * config.weight_decay;
                layer.w.mapv_inplace(|w| w * keep);
            }
        }
    }
    let final_loss = net.mse(&x, y);
    if !final_loss.is_finite() {
        return Err(ModelError::NonFiniteLoss {
            epoch: config.epochs,
        });
    }
    best = best.min(final_loss);
    log.push(TrainingLogEntry {
        epoch: config.epochs,
        loss: best,
    });

    Ok(MlpFit {
        config: config.clone(),
        input_dim: features.ncols(),
        output_dim: targets.ncols(),
        feature_mean: mean,
        feature_std: std,
        network: net,
        training_log: log,
        final_loss,
    })
}

/// Single-output convenience over `fit_mlp`.
pub fn fit_mlp_vector(
    features: &Matrix,
    z: &Vector,
    config: &MlpConfig,
) -> Result<MlpFit, ModelError> {
    let targets = Matrix::from_shape_vec(z.len(), 1, z.to_vec())?;
    fit_mlp(features, &targets, config)
}

/// Compares reverse-mode gradients against central finite differences over
/// every parameter at the seeded initialization; returns the maximum
/// relative discrepancy. Keep the instance small: the cost is two forward
/// passes per parameter.
pub fn gradient_check(
    config: &MlpConfig,
    features: &Matrix,
    z: &Vector,
) -> Result<f64, ModelError> {
    const STEP: f64 = 1e-5;
    let n = features.nrows();
    if z.len() != n {
        return Err(ModelError::DimensionMismatch {
            context: format!("{n} feature rows but {} targets", z.len()),
        });
    }
    assert!(n <= 10, "gradient check expects at most 10 samples");
    assert!(
        config.hidden_layers.len() <= 2 && config.hidden_layers.iter().all(|&w| w <= 8),
        "gradient check expects at most 2 hidden layers of width 8"
    );

    let (mean, std) = match config.features {
        MlpFeatures::StandardizedRaw => standardization(features.array()),
        MlpFeatures::LearnedFourier { .. } => (
            Array1::zeros(features.ncols()),
            Array1::ones(features.ncols()),
        ),
    };
    let x = (features.array() - &mean) / &std;
    let y = Matrix::from_shape_vec(n, 1, z.to_vec())?.into_array();

    let mut net = Network::init(features.ncols(), 1, config);
    let (_, grads) = net.loss_and_gradients(&x, &y);
    let analytic = grads.to_flat();
    let mut flat = net.to_flat();
    let mut worst: f64 = 0.0;
    for i in 0..flat.len() {
        let saved = flat[i];
        flat[i] = saved + STEP;
        net.set_flat(&flat);
        let up = net.mse(&x, &y);
        flat[i] = saved - STEP;
        net.set_flat(&flat);
        let down = net.mse(&x, &y);
        flat[i] = saved;
        net.set_flat(&flat);
        let numeric = (up - down) / (2.0 * STEP);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RandomStream;

    fn small_inputs(n: usize, dim: usize, seed: u64) -> (Matrix, Vector) {
        let mut stream = RandomStream::from_seed(seed);
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| stream.uniform(-2.0, 2.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..n).map(|_| stream.normal()).collect();
        (
            Matrix::from_rows(&rows).unwrap(),
            Vector::from_slice(&targets).unwrap(),
        )
    }

    #[test]
    fn gradient_matches_finite_differences_raw() {
        let (x, z) = small_inputs(8, 2, 21);
        let config = MlpConfig {
            hidden_layers: vec![8, 8],
            epochs: 1,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 5,
        };
        let worst = gradient_check(&config, &x, &z).unwrap();
        assert!(worst < 1e-5, "max relative discrepancy {worst}");
    }

    #[test]
    fn gradient_matches_finite_differences_learned_fourier() {
        let (x, z) = small_inputs(8, 3, 33);
        let config = MlpConfig {
            hidden_layers: vec![6],
            epochs: 1,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::learned_fourier_default(),
            seed: 11,
        };
        let worst = gradient_check(&config, &x, &z).unwrap();
        assert!(worst < 1e-5, "max relative discrepancy {worst}");
    }

    #[test]
    fn zero_network_on_zero_target_has_zero_gradient() {
        let (x, _) = small_inputs(6, 2, 2);
        let config = MlpConfig {
            hidden_layers: vec![4],
            epochs: 1,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 1,
        };
        let mut net = Network::init(2, 1, &config);
        let zeros = vec![0.0; net.to_flat().len()];
        net.set_flat(&zeros);
        let y = Array2::zeros((6, 1));
        let (loss, grads) = net.loss_and_gradients(x.array(), &y);
        assert_eq!(loss, 0.0);
        assert!(grads.to_flat().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn fits_linear_target() {
        let n = 200;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let x = Matrix::from_rows(&xs.iter().map(|&v| vec![v]).collect::<Vec<_>>()).unwrap();
        let y = Vector::from_slice(&xs.iter().map(|&v| 3.0 * v).collect::<Vec<_>>()).unwrap();
        let config = MlpConfig {
            hidden_layers: vec![16, 16],
            epochs: 500,
            learning_rate: 3e-2,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 3,
        };
        let fit = fit_mlp_vector(&x, &y, &config).unwrap();
        assert!(fit.final_loss < 1e-3, "final loss {}", fit.final_loss);
        let pred = fit.predict_vector(&x).unwrap();
        let abs_err: f64 = (0..n).map(|i| (pred.get(i) - y.get(i)).abs()).sum::<f64>() / n as f64;
        let abs_mean: f64 = y.to_vec().iter().map(|v| v.abs()).sum::<f64>() / n as f64;
        assert!(abs_err / abs_mean < 0.01, "relative error {}", abs_err / abs_mean);
    }

    #[test]
    fn zero_target_trains_to_zero() {
        let (x, _) = small_inputs(50, 1, 17);
        let y = Vector::zeros(50);
        let config = MlpConfig {
            hidden_layers: vec![4],
            epochs: 5000,
            learning_rate: 3e-2,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 2,
        };
        let fit = fit_mlp_vector(&x, &y, &config).unwrap();
        let pred = fit.predict_vector(&x).unwrap();
        assert!(pred.to_vec().iter().all(|p| p.abs() < 1e-3));
    }

    #[test]
    fn training_is_bit_reproducible() {
        let (x, z) = small_inputs(30, 2, 8);
        let config = MlpConfig {
            hidden_layers: vec![8],
            epochs: 50,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 44,
        };
        let a = fit_mlp_vector(&x, &z, &config).unwrap();
        let b = fit_mlp_vector(&x, &z, &config).unwrap();
        assert_eq!(a.final_loss.to_bits(), b.final_loss.to_bits());
        let pa = a.predict_vector(&x).unwrap().to_vec();
        let pb = b.predict_vector(&x).unwrap().to_vec();
        assert!(pa
            .iter()
            .zip(pb.iter())
            .all(|(u, v)| u.to_bits() == v.to_bits()));
    }

    #[test]
    fn exploding_learning_rate_reports_epoch() {
        let (x, z) = small_inputs(10, 1, 5);
        let config = MlpConfig {
            hidden_layers: vec![8],
            epochs: 5,
            learning_rate: 1e200,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::StandardizedRaw,
            seed: 1,
        };
        let err = fit_mlp_vector(&x, &z, &config).unwrap_err();
        match err {
            ModelError::NonFiniteLoss { epoch } => assert!(epoch >= 2 && epoch <= 5),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn learned_fourier_records_frequencies_and_round_trips() {
        let (x, z) = small_inputs(24, 2, 13);
        let config = MlpConfig {
            hidden_layers: vec![8],
            epochs: 30,
            learning_rate: 1e-3,
            schedule: LrSchedule::Constant,
            weight_decay: 0.0,
            features: MlpFeatures::learned_fourier_default(),
            seed: 7,
        };
        let fit = fit_mlp_vector(&x, &z, &config).unwrap();
        let freqs = fit.log_frequencies().unwrap();
        assert_eq!(freqs.len(), 2);
        let json = serde_json::to_string(&fit).unwrap();
        let restored: MlpFit = serde_json::from_str(&json).unwrap();
        let pa = fit.predict_vector(&x).unwrap().to_vec();
        let pb = restored.predict_vector(&x).unwrap().to_vec();
        assert!(pa
            .iter()
            .zip(pb.iter())
            .all(|(u, v)| u.to_bits() == v.to_bits()));
    }
}
