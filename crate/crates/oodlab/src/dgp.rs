//! Data-generating processes and window sampling.
//!
//! Every experiment starts from a `DgpSpec`: a closed-form ground-truth
//! function together with sampling windows. Training windows and evaluation
//! windows are disjoint by construction, which is the whole point of the
//! laboratory: a model is fit on one window and interrogated on another.
//!
//! The catalog spans four qualitative regimes:
//!
//! - periodic targets (`Sin`, `HarmonicProduct`, `SquashedHarmonicProduct`,
//!   and the torus fields) where extrapolation means continuing an
//!   oscillation;
//! - polynomial and power-law targets (`Polynomial`, `PowerLaw`,
//!   `SinTaylor9`) where extrapolation means continuing growth;
//! - exponential-family targets (`Exponential`, `LogNormalBump`, `Gompertz`,
//!   `KeplerPeriod`) that become linear under log transforms;
//! - a bilinear vector field (`MassAction`) whose components are exactly
//!   representable in a product-feature basis.

use serde::{Deserialize, Serialize};

use crate::numerics::{Matrix, RandomStream};

// ---------------------------------------------------------------------------
// Specs
// ---------------------------------------------------------------------------

/// A ground-truth data-generating process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DgpSpec {
    /// `y = sin(freq * x)`.
    Sin { freq: f64 },
    /// Degree-9 Taylor polynomial of sine about 0. Indistinguishable from
    /// `Sin { freq: 1 }` near the origin, wildly different beyond one period.
    SinTaylor9,
    /// `y = c_0 + c_1 x + c_2 x^2 + ...` with ascending coefficients.
    Polynomial { coeffs: Vec<f64> },
    /// `y = scale * x^exponent`, defined for `x > 0`.
    PowerLaw { scale: f64, exponent: f64 },
    /// `y = scale * exp(rate * x)`.
    Exponential { scale: f64, rate: f64 },
    /// `y = sin(x) cos(2x)`: two incommensurate-looking harmonics whose
    /// product is a short trigonometric polynomial.
    HarmonicProduct,
    /// `y = tanh(5 sin(x) cos(2x))`: the same harmonic product pushed through
    /// a saturating gate, which destroys the short Fourier representation.
    SquashedHarmonicProduct,
    /// `y = exp(2 ln x - (ln x)^2)`, a log-normal-shaped bump peaked at
    /// `x = e`. Exactly a quadratic in `(ln x, ln y)` coordinates.
    LogNormalBump,
    /// `y = exp(1 - 2 e^{-x})`, a Gompertz growth curve saturating at `e`.
    /// Exactly linear in `e^{-x}` after a log transform of `y`.
    Gompertz,
    /// Two-species mass-action field: component `i` of the output is
    /// `feed - decay * x_i - rate * x_1 x_2`.
    MassAction { feed: f64, decay: f64, rate: f64 },
    /// Orbital period law `T = exp(log_const) * a^{3/2} * M^{-1/2}` with
    /// inputs `(a, M)`: semi-major axis and stellar mass.
    KeplerPeriod { log_const: f64 },
    /// Torus field mixing a separable mean with a full product interaction:
    /// `g = (1 - mix) * mean_j sin(t_j) + mix * prod_j sin(t_j)`.
    TorusInteraction { dim: usize, mix: f64 },
    /// Pure order-`order` torus interaction, normalized to unit variance:
    /// `g = binom(dim, order)^{-1/2} * sum_{|S| = order} prod_{j in S}
    /// sqrt(2) sin(t_j)`.
    TorusOrderInteraction { dim: usize, order: usize },
}

impl DgpSpec {
    pub fn input_dim(&self) -> usize {
        match self {
            DgpSpec::MassAction { .. } | DgpSpec::KeplerPeriod { .. } => 2,
            DgpSpec::TorusInteraction { dim, .. }
            | DgpSpec::TorusOrderInteraction { dim, .. } => *dim,
            _ => 1,
        }
    }

    pub fn output_dim(&self) -> usize {
        match self {
            DgpSpec::MassAction { .. } => 2,
            _ => 1,
        }
    }

    /// Evaluates the ground truth at one input point.
    ///
    /// Panics if `x` has the wrong dimension; domain violations (for example
    /// a log-family spec at `x <= 0`) surface as non-finite outputs, which
    /// dataset assembly rejects.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(
            x.len(),
            self.input_dim(),
            "input dimension mismatch for {self}"
        );
        match self {
            DgpSpec::Sin { freq } => vec![(freq * x[0]).sin()],
            DgpSpec::SinTaylor9 => {
                let t = x[0];
                let t2 = t * t;
                // Horner in x^2 over the odd sine coefficients.
                let mut acc = 1.0 / 362880.0;
                for c in [-1.0 / 5040.0, 1.0 / 120.0, -1.0 / 6.0, 1.0] {
                    acc = acc * t2 + c;
                }
                vec![acc * t]
            }
            DgpSpec::Polynomial { coeffs } => {
                let mut acc = 0.0;
                for &c in coeffs.iter().rev() {
                    acc = acc * x[0] + c;
                }
                vec![acc]
            }
            DgpSpec::PowerLaw { scale, exponent } => vec![scale * x[0].powf(*exponent)],
            DgpSpec::Exponential { scale, rate } => vec![scale * (rate * x[0]).exp()],
            DgpSpec::HarmonicProduct => vec![x[0].sin() * (2.0 * x[0]).cos()],
            DgpSpec::SquashedHarmonicProduct => {
                vec![(5.0 * x[0].sin() * (2.0 * x[0]).cos()).tanh()]
            }
            DgpSpec::LogNormalBump => {
                let u = x[0].ln();
                vec![(2.0 * u - u * u).exp()]
            }
            DgpSpec::Gompertz => vec![(1.0 - 2.0 * (-x[0]).exp()).exp()],
            DgpSpec::MassAction { feed, decay, rate } => {
                let cross = rate * x[0] * x[1];
                vec![feed - decay * x[0] - cross, feed - decay * x[1] - cross]
            }
            DgpSpec::KeplerPeriod { log_const } => {
                vec![(log_const + 1.5 * x[0].ln() - 0.5 * x[1].ln()).exp()]
            }
            DgpSpec::TorusInteraction { dim, mix } => {
                let mut sum = 0.0;
                let mut prod = 1.0;
                for &t in x {
                    sum += t.sin();
                    prod *= t.sin();
                }
                vec![(1.0 - mix) * sum / *dim as f64 + mix * prod]
            }
            DgpSpec::TorusOrderInteraction { dim, order } => {
                // Elementary symmetric polynomial e_order of sqrt(2) sin(t_j),
                // built by multiplying out prod_j (1 + z_j t) one factor at a
                // time and keeping coefficients up to t^order.
                let mut e = vec![0.0; order + 1];
                e[0] = 1.0;
                for &t in x {
                    let z = std::f64::consts::SQRT_2 * t.sin();
                    for k in (1..=*order).rev() {
                        e[k] += z * e[k - 1];
                    }
                }
                vec![e[*order] / binomial(*dim, *order).sqrt()]
            }
        }
    }
}

impl std::fmt::Display for DgpSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DgpSpec::Sin { freq } if *freq == 1.0 => write!(f, "sin"),
            DgpSpec::Sin { freq } => write!(f, "sin{freq}x"),
            DgpSpec::SinTaylor9 => write!(f, "sin-taylor9"),
            DgpSpec::Polynomial { coeffs } => {
                let parts: Vec<String> = coeffs.iter().map(|c| format!("{c}")).collect();
                write!(f, "poly({})", parts.join(","))
            }
            DgpSpec::PowerLaw { scale, exponent } => write!(f, "powerlaw({scale},{exponent})"),
            DgpSpec::Exponential { scale, rate } => write!(f, "exponential({scale},{rate})"),
            DgpSpec::HarmonicProduct => write!(f, "harmonic-product"),
            DgpSpec::SquashedHarmonicProduct => write!(f, "squashed-harmonic"),
            DgpSpec::LogNormalBump => write!(f, "lognormal-bump"),
            DgpSpec::Gompertz => write!(f, "gompertz"),
            DgpSpec::MassAction { .. } => write!(f, "mass-action"),
            DgpSpec::KeplerPeriod { .. } => write!(f, "kepler-period"),
            DgpSpec::TorusInteraction { dim, mix } => write!(f, "torus-int(d={dim},mix={mix})"),
            DgpSpec::TorusOrderInteraction { dim, order } => {
                write!(f, "torus-order(d={dim},q={order})")
            }
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k.min(n));
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

// ---------------------------------------------------------------------------
// Regions and windows
// ---------------------------------------------------------------------------

/// A one-dimensional sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// An axis-aligned box in input space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRegion {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxRegion {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box bounds must have equal dimension");
        Self { lo, hi }
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }
}

impl From<Interval> for BoxRegion {
    fn from(w: Interval) -> Self {
        BoxRegion {
            lo: vec![w.lo],
            hi: vec![w.hi],
        }
    }
}

/// Which role a dataset plays in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowTag {
    Train,
    NearBoundary,
    IdTest,
    OodTest,
}

impl std::fmt::Display for WindowTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            WindowTag::Train => "train",
            WindowTag::NearBoundary => "near_boundary",
            WindowTag::IdTest => "id_test",
            WindowTag::OodTest => "ood_test",
        };
        f.write_str(s)
    }
}

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

/// Sampled inputs and (possibly noisy) targets from one window.
#[derive(Debug, Clone)]
pub struct Dataset {
    /// `n x input_dim`.
    pub inputs: Matrix,
    /// `n x output_dim`. Noise, when present, is additive Gaussian.
    pub targets: Matrix,
    pub window: WindowTag,
    pub noise_sigma: f64,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.inputs.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The single input coordinate of a one-dimensional dataset.
    pub fn x(&self) -> Vec<f64> {
        assert_eq!(self.inputs.ncols(), 1, "dataset is not one-dimensional");
        (0..self.len()).map(|i| self.inputs.get(i, 0)).collect()
    }

    /// The single target of a scalar-output dataset.
    pub fn y(&self) -> Vec<f64> {
        assert_eq!(self.targets.ncols(), 1, "dataset target is not scalar");
        (0..self.len()).map(|i| self.targets.get(i, 0)).collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum DgpError {
    #[error("window [{lo}, {hi}] is empty or inverted")]
    InvalidWindow { lo: f64, hi: f64 },
    #[error("{context} needs at least {required} points, got {actual}")]
    TooFewPoints {
        context: &'static str,
        required: usize,
        actual: usize,
    },
    #[error("grid sampling needs a 1-d process, {spec} has input dimension {dim}")]
    GridDimension { spec: String, dim: usize },
    #[error("region dimension {region} does not match process input dimension {spec}")]
    RegionDimension { region: usize, spec: usize },
    #[error("process produced a non-finite target at row {row}; input outside its domain?")]
    NonFiniteTarget { row: usize },
}

/// Samples a 1-d process on an evenly spaced grid with both endpoints
/// included. Noise draws come from `stream` only when `sigma > 0`, so the
/// clean and noisy versions of a window share inputs.
pub fn sample_grid(
    spec: &DgpSpec,
    window: Interval,
    n: usize,
    sigma: f64,
    stream: &mut RandomStream,
    tag: WindowTag,
) -> Result<Dataset, DgpError> {
    if spec.input_dim() != 1 {
        return Err(DgpError::GridDimension {
            spec: spec.to_string(),
            dim: spec.input_dim(),
        });
    }
    if n < 2 {
        return Err(DgpError::TooFewPoints {
            context: "grid sampling",
            required: 2,
            actual: n,
        });
    }
    if !(window.hi > window.lo) {
        return Err(DgpError::InvalidWindow {
            lo: window.lo,
            hi: window.hi,
        });
    }
    let step = (window.hi - window.lo) / (n - 1) as f64;
    let inputs: Vec<Vec<f64>> = (0..n).map(|i| vec![window.lo + i as f64 * step]).collect();
    assemble(spec, inputs, sigma, stream, tag)
}

/// Samples inputs uniformly at random from a box.
pub fn sample_uniform(
    spec: &DgpSpec,
    region: &BoxRegion,
    n: usize,
    sigma: f64,
    stream: &mut RandomStream,
    tag: WindowTag,
) -> Result<Dataset, DgpError> {
    if region.dim() != spec.input_dim() {
        return Err(DgpError::RegionDimension {
            region: region.dim(),
            spec: spec.input_dim(),
        });
    }
    if n == 0 {
        return Err(DgpError::TooFewPoints {
            context: "uniform sampling",
            required: 1,
            actual: n,
        });
    }
    for (lo, hi) in region.lo.iter().zip(&region.hi) {
        if !(hi > lo) {
            return Err(DgpError::InvalidWindow { lo: *lo, hi: *hi });
        }
    }
    let d = region.dim();
    let inputs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            (0..d)
                .map(|j| stream.uniform(region.lo[j], region.hi[j]))
                .collect()
        })
        .collect();
    assemble(spec, inputs, sigma, stream, tag)
}

/// Samples a full lattice with `per_axis` evenly spaced points on each axis,
/// right endpoint excluded.
///
/// The exclusive convention is deliberate: the torus fields are periodic, so
/// including both `0` and `2 pi` would duplicate a point and skew coverage
/// comparisons between lattice resolutions.
pub fn sample_lattice(
    spec: &DgpSpec,
    region: &BoxRegion,
    per_axis: usize,
    sigma: f64,
    stream: &mut RandomStream,
    tag: WindowTag,
) -> Result<Dataset, DgpError> {
    if region.dim() != spec.input_dim() {
        return Err(DgpError::RegionDimension {
            region: region.dim(),
            spec: spec.input_dim(),
        });
    }
    if per_axis == 0 {
        return Err(DgpError::TooFewPoints {
            context: "lattice sampling",
            required: 1,
            actual: 0,
        });
    }
    let d = region.dim();
    let n = per_axis.pow(d as u32);
    let mut inputs = Vec::with_capacity(n);
    let mut idx = vec![0usize; d];
    loop {
        let point: Vec<f64> = (0..d)
            .map(|j| {
                let step = (region.hi[j] - region.lo[j]) / per_axis as f64;
                region.lo[j] + idx[j] as f64 * step
            })
            .collect();
        inputs.push(point);
        // Odometer increment over the multi-index.
        let mut axis = 0;
        loop {
            idx[axis] += 1;
            if idx[axis] < per_axis {
                break;
            }
            idx[axis] = 0;
            axis += 1;
            if axis == d {
                debug_assert_eq!(inputs.len(), n);
                return assemble(spec, inputs, sigma, stream, tag);
            }
        }
    }
}

fn assemble(
    spec: &DgpSpec,
    inputs: Vec<Vec<f64>>,
    sigma: f64,
    stream: &mut RandomStream,
    tag: WindowTag,
) -> Result<Dataset, DgpError> {
    let m = spec.output_dim();
    let mut targets = Vec::with_capacity(inputs.len());
    for (row, x) in inputs.iter().enumerate() {
        let mut y = spec.eval(x);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(DgpError::NonFiniteTarget { row });
        }
        if sigma > 0.0 {
            for v in &mut y {
                *v += sigma * stream.normal();
            }
        }
        debug_assert_eq!(y.len(), m);
        targets.push(y);
    }
    let inputs = Matrix::from_rows(&inputs).expect("inputs validated finite");
    let targets = Matrix::from_rows(&targets).map_err(|_| DgpError::NonFiniteTarget {
        row: usize::MAX,
    })?;
    Ok(Dataset {
        inputs,
        targets,
        window: tag,
        noise_sigma: sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, PI};

    fn stream() -> RandomStream {
        RandomStream::substream(0, "dgp-tests")
    }

    #[test]
    fn taylor9_shadows_sine_near_origin_and_departs_beyond_a_period() {
        let spec = DgpSpec::SinTaylor9;
        // Truncation error on |x| <= 1 is bounded by 1/11! ~ 2.6e-8.
        for i in 0..50 {
            let x = -1.0 + i as f64 * 0.04;
            assert_abs_diff_eq!(spec.eval(&[x])[0], x.sin(), epsilon = 5e-8);
        }
        // Known checkpoint: the truncation leaves ~6.9e-3 at x = pi.
        assert_abs_diff_eq!(spec.eval(&[PI])[0], 0.0069243, epsilon = 1e-6);
        // Far from the origin the polynomial tail dominates.
        assert!(spec.eval(&[2.0 * PI])[0].abs() > 5.0);
    }

    #[test]
    fn closed_form_checkpoints() {
        assert_abs_diff_eq!(
            DgpSpec::Sin { freq: 2.0 }.eval(&[0.7])[0],
            (1.4f64).sin(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            DgpSpec::Polynomial {
                coeffs: vec![0.0, 1.0, 0.0, 1.0]
            }
            .eval(&[2.0])[0],
            10.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            DgpSpec::PowerLaw {
                scale: 1.0,
                exponent: 2.0
            }
            .eval(&[3.0])[0],
            9.0,
            epsilon = 1e-12
        );
        // Exponential calibrated to agree with x^2 at x = 1 and x = 2.
        let exp = DgpSpec::Exponential {
            scale: 0.25,
            rate: 2.0 * (2.0f64).ln(),
        };
        assert_abs_diff_eq!(exp.eval(&[1.0])[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(exp.eval(&[2.0])[0], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            DgpSpec::HarmonicProduct.eval(&[0.5])[0],
            0.5f64.sin() * 1.0f64.cos(),
            epsilon = 1e-15
        );
        // The bump peaks at x = e with height e.
        assert_abs_diff_eq!(DgpSpec::LogNormalBump.eval(&[E])[0], E, epsilon = 1e-12);
        // Gompertz: e^{-1} at the origin, saturating toward e.
        assert_abs_diff_eq!(DgpSpec::Gompertz.eval(&[0.0])[0], 1.0 / E, epsilon = 1e-12);
        assert_abs_diff_eq!(DgpSpec::Gompertz.eval(&[40.0])[0], E, epsilon = 1e-9);
    }

    #[test]
    fn mass_action_components() {
        let spec = DgpSpec::MassAction {
            feed: 0.5,
            decay: 0.1,
            rate: 1.0,
        };
        let out = spec.eval(&[2.0, 3.0]);
        assert_abs_diff_eq!(out[0], 0.5 - 0.2 - 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(out[1], 0.5 - 0.3 - 6.0, epsilon = 1e-12);
    }

    #[test]
    fn kepler_period_at_earth_parameters() {
        let spec = DgpSpec::KeplerPeriod {
            log_const: 365.25f64.ln(),
        };
        assert_abs_diff_eq!(spec.eval(&[1.0, 1.0])[0], 365.25, epsilon = 1e-9);
        // Doubling the semi-major axis multiplies the period by 2^{3/2}.
        assert_abs_diff_eq!(
            spec.eval(&[2.0, 1.0])[0] / spec.eval(&[1.0, 1.0])[0],
            2.0f64.powf(1.5),
            epsilon = 1e-12
        );
    }

    #[test]
    fn torus_order_interaction_matches_explicit_sum_and_has_unit_variance() {
        let spec = DgpSpec::TorusOrderInteraction { dim: 4, order: 2 };
        let t: [f64; 4] = [0.3, 1.1, 2.0, 4.4];
        let z: Vec<f64> = t.iter().map(|v| 2.0f64.sqrt() * v.sin()).collect();
        let mut explicit = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                explicit += z[i] * z[j];
            }
        }
        explicit /= 6.0f64.sqrt();
        assert_abs_diff_eq!(spec.eval(&t)[0], explicit, epsilon = 1e-12);

        // Unit variance over the torus, by Monte Carlo.
        let mut s = stream();
        let n = 20000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let point: Vec<f64> = (0..4).map(|_| s.uniform(0.0, 2.0 * PI)).collect();
            let g = spec.eval(&point)[0];
            sum += g;
            sumsq += g * g;
        }
        let mean = sum / n as f64;
        let var = sumsq / n as f64 - mean * mean;
        assert!(
            (var - 1.0).abs() < 0.15,
            "expected variance near 1, got {var}"
        );
    }

    #[test]
    fn torus_interaction_mixes_mean_and_product() {
        let spec = DgpSpec::TorusInteraction { dim: 3, mix: 0.35 };
        let t: [f64; 3] = [0.2, 1.5, 3.0];
        let mean = (t[0].sin() + t[1].sin() + t[2].sin()) / 3.0;
        let prod = t[0].sin() * t[1].sin() * t[2].sin();
        assert_abs_diff_eq!(
            spec.eval(&t)[0],
            0.65 * mean + 0.35 * prod,
            epsilon = 1e-12
        );
    }

    #[test]
    fn grid_includes_both_endpoints() {
        let mut s = stream();
        let d = sample_grid(
            &DgpSpec::Sin { freq: 1.0 },
            Interval::new(0.0, 1.0),
            5,
            0.0,
            &mut s,
            WindowTag::Train,
        )
        .unwrap();
        assert_eq!(d.x(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(d.window, WindowTag::Train);
    }

    #[test]
    fn lattice_excludes_right_endpoint() {
        let mut s = stream();
        let d = sample_lattice(
            &DgpSpec::TorusInteraction { dim: 2, mix: 0.5 },
            &BoxRegion::cube(2, 0.0, 2.0 * PI),
            4,
            0.0,
            &mut s,
            WindowTag::Train,
        )
        .unwrap();
        assert_eq!(d.len(), 16);
        let mut first_axis: Vec<f64> = (0..16).map(|i| d.inputs.get(i, 0)).collect();
        first_axis.sort_by(|a, b| a.partial_cmp(b).unwrap());
        first_axis.dedup();
        assert_eq!(first_axis.len(), 4);
        assert_abs_diff_eq!(first_axis[3], 1.5 * PI, epsilon = 1e-12);
    }

    #[test]
    fn uniform_sampling_stays_in_region_and_is_reproducible() {
        let region = BoxRegion::new(vec![1.0, 0.5], vec![2.0, 4.0]);
        let spec = DgpSpec::KeplerPeriod { log_const: 0.0 };
        let mut s1 = RandomStream::substream(11, "train");
        let mut s2 = RandomStream::substream(11, "train");
        let d1 = sample_uniform(&spec, &region, 64, 0.0, &mut s1, WindowTag::Train).unwrap();
        let d2 = sample_uniform(&spec, &region, 64, 0.0, &mut s2, WindowTag::Train).unwrap();
        assert_eq!(d1.inputs, d2.inputs);
        for i in 0..64 {
            assert!((1.0..2.0).contains(&d1.inputs.get(i, 0)));
            assert!((0.5..4.0).contains(&d1.inputs.get(i, 1)));
        }
    }

    #[test]
    fn noise_level_matches_requested_sigma() {
        let spec = DgpSpec::PowerLaw {
            scale: 1.0,
            exponent: 2.0,
        };
        let mut s = stream();
        let noisy = sample_grid(
            &spec,
            Interval::new(1.0, 2.0),
            150,
            0.2,
            &mut s,
            WindowTag::Train,
        )
        .unwrap();
        let mut sse = 0.0;
        for (i, x) in noisy.x().iter().enumerate() {
            let clean = spec.eval(&[*x])[0];
            sse += (noisy.targets.get(i, 0) - clean).powi(2);
        }
        let sigma_hat = (sse / 150.0).sqrt();
        assert!(
            (0.15..=0.25).contains(&sigma_hat),
            "sigma_hat = {sigma_hat}"
        );
    }

    #[test]
    fn noise_does_not_perturb_inputs() {
        // Drawing noise must not change which inputs are sampled.
        let region = BoxRegion::cube(1, 0.0, 1.0);
        let spec = DgpSpec::Sin { freq: 1.0 };
        let mut s1 = RandomStream::substream(5, "w");
        let mut s2 = RandomStream::substream(5, "w");
        let clean = sample_uniform(&spec, &region, 32, 0.0, &mut s1, WindowTag::Train).unwrap();
        let noisy = sample_uniform(&spec, &region, 32, 0.3, &mut s2, WindowTag::Train).unwrap();
        assert_eq!(clean.inputs, noisy.inputs);
    }

    #[test]
    fn log_domain_violation_is_rejected() {
        let mut s = stream();
        let r = sample_grid(
            &DgpSpec::LogNormalBump,
            Interval::new(-1.0, 1.0),
            10,
            0.0,
            &mut s,
            WindowTag::Train,
        );
        match r {
            Err(DgpError::NonFiniteTarget { .. }) => {}
            other => panic!("expected NonFiniteTarget, got {other:?}"),
        }
    }

    #[test]
    fn spec_serialization_round_trips() {
        let specs = vec![
            DgpSpec::Sin { freq: 2.0 },
            DgpSpec::Polynomial {
                coeffs: vec![0.0, 1.0, 0.0, 1.0],
            },
            DgpSpec::TorusOrderInteraction { dim: 5, order: 3 },
        ];
        for spec in specs {
            let json = serde_json::to_string(&spec).unwrap();
            let back: DgpSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(spec, back);
        }
    }
}
