//! Derivative-residual diagnostic for a committed coordinate system.
//!
//! The committed feature and label maps turn samples (x, y) into
//! trajectories of transformed states. A sparse dynamics fit in those
//! coordinates scores how well the commitment linearizes the process:
//! correct commitments leave near-zero residuals on both windows, wrong
//! ones blow up off the training window.

use serde::{Deserialize, Serialize};

use super::DiagnosticsError;
use crate::dgp::Dataset;
use crate::models::{stlsq, PolynomialLibrary, StlsqOptions, StlsqSolution};
use crate::numerics::{finite_difference_derivative, BoundaryOrder, Matrix, Vector};
use crate::transforms::{FeatureMapSpec, LabelMapSpec};

/// Which transformed states the library terms may mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LibraryVariables {
    /// Feature coordinates u only.
    Coordinate,
    /// Transformed label v only.
    State,
    /// Both u and v.
    #[default]
    CoordinateAndState,
}

/// Polynomial library configuration for the diagnostic.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaLibrary {
    pub degree: usize,
    pub include_bias: bool,
    pub variables: LibraryVariables,
}

impl DeltaLibrary {
    pub fn new(degree: usize, include_bias: bool, variables: LibraryVariables) -> Self {
        Self {
            degree,
            include_bias,
            variables,
        }
    }
}

/// Normalized derivative residuals of one commitment on both windows.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagnosticReport {
    /// Mean per-equation normalized residual on the training window.
    pub delta_train: f64,
    /// Same model, scored on the held-out window.
    pub delta_ood: f64,
    /// Active terms summed across all fitted equations.
    pub k_active: usize,
}

/// One window reduced to a strictly ordered trajectory of states and their
/// derivatives along the integration coordinate.
struct Trajectory {
    /// `n x s` state matrix, columns ordered u_1..u_p then v.
    states: Matrix,
    /// One derivative series per state equation being fit.
    derivatives: Vec<Vec<f64>>,
}

const DEGENERATE_DENOM: f64 = 1e-20;

/// Fits sparse dynamics for the transformed states on the training window
/// and reports normalized residuals on both windows.
///
/// With a single feature coordinate the label derivative dv/du is fit
/// directly on the u-ordered trajectory. With several coordinates the
/// trajectory is ordered by x and every state (each u_j and v) gets an
/// equation in x. Each equation's residual is normalized by the derivative
/// energy of its window; a window with no derivative energy in an equation
/// scores that equation as 1.
pub fn delta_ood(
    train: &Dataset,
    ood: &Dataset,
    feature_spec: &FeatureMapSpec,
    label_spec: &LabelMapSpec,
    library: &DeltaLibrary,
    threshold: f64,
    max_iter: usize,
) -> Result<DiagnosticReport, DiagnosticsError> {
    for (name, data) in [("train", train), ("ood", ood)] {
        if data.inputs.ncols() != 1 {
            return Err(DiagnosticsError::DomainViolation {
                context: format!(
                    "{name} window has {} input columns, diagnostic needs 1",
                    data.inputs.ncols()
                ),
            });
        }
        if data.targets.ncols() != 1 {
            return Err(DiagnosticsError::DomainViolation {
                context: format!("{name} window target is not scalar"),
            });
        }
    }
    let p = feature_spec.output_dim(1);

    let train_traj = build_trajectory(train, feature_spec, label_spec)?;
    let ood_traj = build_trajectory(ood, feature_spec, label_spec)?;

    let train_design = library_design(library, &train_traj.states, p)?;
    let ood_design = library_design(library, &ood_traj.states, p)?;

    let options = StlsqOptions {
        threshold,
        max_iter,
    };
    let mut fits: Vec<StlsqSolution> = Vec::with_capacity(train_traj.derivatives.len());
    for series in &train_traj.derivatives {
        let target = Vector::from_slice(series)?;
        fits.push(stlsq(&train_design, &target, &options)?);
    }

    let delta_train = window_delta(&train_design, &train_traj.derivatives, &fits);
    let delta_ood = window_delta(&ood_design, &ood_traj.derivatives, &fits);
    let k_active = fits.iter().map(|f| f.k_active).sum();

    Ok(DiagnosticReport {
        delta_train,
        delta_ood,
        k_active,
    })
}

/// Transforms one window and differentiates its states along the
/// integration coordinate.
fn build_trajectory(
    data: &Dataset,
    feature_spec: &FeatureMapSpec,
    label_spec: &LabelMapSpec,
) -> Result<Trajectory, DiagnosticsError> {
    let x = data.x();
    let features = feature_spec.apply(&data.inputs)?;
    let p = features.ncols();
    let v = label_spec.apply(&data.y())?.values;
    let n = x.len();

    // Order the trajectory by its integration coordinate: the lone feature
    // coordinate when p = 1 (so decreasing maps still give an increasing
    // grid), the raw input otherwise.
    let mut order: Vec<usize> = (0..n).collect();
    if p == 1 {
        order.sort_by(|&a, &b| features.get(a, 0).total_cmp(&features.get(b, 0)));
    } else {
        order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    }

    let mut state_rows: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &i in &order {
        let mut row: Vec<f64> = (0..p).map(|j| features.get(i, j)).collect();
        row.push(v[i]);
        state_rows.push(row);
    }
    let states = Matrix::from_rows(&state_rows)?;

    let tau: Vec<f64> = if p == 1 {
        order.iter().map(|&i| features.get(i, 0)).collect()
    } else {
        order.iter().map(|&i| x[i]).collect()
    };

    // p = 1 fits the single equation dv/du; p > 1 fits one equation per
    // state in x.
    let mut derivatives = Vec::new();
    if p == 1 {
        let series: Vec<f64> = (0..n).map(|i| states.get(i, 1)).collect();
        derivatives.push(finite_difference_derivative(
            &tau,
            &series,
            BoundaryOrder::Second,
        )?);
    } else {
        for j in 0..=p {
            let series: Vec<f64> = (0..n).map(|i| states.get(i, j)).collect();
            derivatives.push(finite_difference_derivative(
                &tau,
                &series,
                BoundaryOrder::Second,
            )?);
        }
    }

    Ok(Trajectory {
        states,
        derivatives,
    })
}

/// Library design over the selected state columns.
fn library_design(
    library: &DeltaLibrary,
    states: &Matrix,
    p: usize,
) -> Result<Matrix, DiagnosticsError> {
    let total = states.ncols();
    let columns: Vec<usize> = match library.variables {
        LibraryVariables::Coordinate => (0..p).collect(),
        LibraryVariables::State => vec![total - 1],
        LibraryVariables::CoordinateAndState => (0..total).collect(),
    };
    let names = state_names(p);
    let selected_names: Vec<&str> = columns.iter().map(|&j| names[j].as_str()).collect();
    let poly = PolynomialLibrary::new(library.degree, library.include_bias, &selected_names);
    let selected = states.select_cols(&columns);
    poly.design(&selected).map_err(DiagnosticsError::from)
}

fn state_names(p: usize) -> Vec<String> {
    let mut names: Vec<String> = if p == 1 {
        vec!["u".to_string()]
    } else {
        (1..=p).map(|j| format!("u{j}")).collect()
    };
    names.push("v".to_string());
    names
}

/// Mean over equations of the normalized residual on one window.
fn window_delta(design: &Matrix, derivatives: &[Vec<f64>], fits: &[StlsqSolution]) -> f64 {
    let mut total = 0.0;
    for (fit, series) in fits.iter().zip(derivatives) {
        let mut sse = 0.0;
        let mut energy = 0.0;
        for (i, &d) in series.iter().enumerate() {
            let mut pred = 0.0;
            for (j, &c) in fit.coefficients.iter().enumerate() {
                if c != 0.0 {
                    pred += c * design.get(i, j);
                }
            }
            sse += (pred - d) * (pred - d);
            energy += d * d;
        }
        total += if energy < DEGENERATE_DENOM {
            1.0
        } else {
            sse / energy
        };
    }
    total / fits.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgp::{sample_grid, DgpSpec, Interval, WindowTag};
    use crate::numerics::RandomStream;
    use approx::assert_abs_diff_eq;

    fn clean_grid(spec: &DgpSpec, lo: f64, hi: f64, n: usize) -> Dataset {
        let mut stream = RandomStream::from_seed(0);
        sample_grid(spec, Interval::new(lo, hi), n, 0.0, &mut stream, WindowTag::Train).unwrap()
    }

    #[test]
    fn exact_linear_relation_in_log_coordinates() {
        // y = exp(2u - u^2) with u = ln x satisfies dv/du = 2 - 2u exactly.
        let spec = DgpSpec::LogNormalBump;
        let train = clean_grid(&spec, 1.0, 2.0, 200);
        let ood = clean_grid(&spec, 2.0, 10.0, 400);
        let report = delta_ood(
            &train,
            &ood,
            &FeatureMapSpec::LogX,
            &LabelMapSpec::Log {
                policy: crate::transforms::ClampPolicy::Reject,
            },
            &DeltaLibrary::new(1, true, LibraryVariables::Coordinate),
            0.05,
            50,
        )
        .unwrap();
        assert_eq!(report.k_active, 2);
        assert!(report.delta_train < 1e-3, "train {}", report.delta_train);
        assert!(report.delta_ood < 1e-3, "ood {}", report.delta_ood);
    }

    #[test]
    fn harmonic_coordinates_close_the_sine_dynamics() {
        let spec = DgpSpec::Sin { freq: 1.0 };
        let pi = std::f64::consts::PI;
        let train = clean_grid(&spec, -pi, pi, 200);
        let ood = clean_grid(&spec, pi, 3.0 * pi, 400);
        let report = delta_ood(
            &train,
            &ood,
            &FeatureMapSpec::Fourier { harmonics: 1 },
            &LabelMapSpec::Identity,
            &DeltaLibrary::new(1, true, LibraryVariables::CoordinateAndState),
            0.05,
            50,
        )
        .unwrap();
        assert_eq!(report.k_active, 4);
        assert!(report.delta_ood < 1e-5, "ood {}", report.delta_ood);
    }

    #[test]
    fn raw_state_library_cannot_close_the_sine_dynamics() {
        // dv/dx = cos x is orthogonal to {1, v, v^2} over a full period, so
        // every coefficient thresholds away and the zero model scores 1.
        let spec = DgpSpec::Sin { freq: 1.0 };
        let pi = std::f64::consts::PI;
        let train = clean_grid(&spec, -pi, pi, 200);
        let ood = clean_grid(&spec, pi, 3.0 * pi, 400);
        let report = delta_ood(
            &train,
            &ood,
            &FeatureMapSpec::Raw,
            &LabelMapSpec::Identity,
            &DeltaLibrary::new(2, true, LibraryVariables::State),
            0.05,
            50,
        )
        .unwrap();
        assert!(
            (0.8..=1.2).contains(&report.delta_ood),
            "ood {}",
            report.delta_ood
        );
        assert!(report.delta_train > 0.5, "train {}", report.delta_train);
    }

    #[test]
    fn quadratic_growth_is_linear_in_its_own_coordinate() {
        // v = u^2 gives dv/du = 2u: one active term, zero residual.
        let spec = DgpSpec::Polynomial {
            coeffs: vec![0.0, 0.0, 1.0],
        };
        let train = clean_grid(&spec, 1.0, 2.0, 200);
        let ood = clean_grid(&spec, 2.0, 10.0, 400);
        let report = delta_ood(
            &train,
            &ood,
            &FeatureMapSpec::Raw,
            &LabelMapSpec::Identity,
            &DeltaLibrary::new(1, true, LibraryVariables::Coordinate),
            0.05,
            50,
        )
        .unwrap();
        assert_eq!(report.k_active, 1);
        assert_abs_diff_eq!(report.delta_ood, 0.0, epsilon = 1e-10);
    }

    #[test]
    fn decreasing_coordinate_is_reordered_before_differencing() {
        // u = e^{-x} decreases in x; the trajectory must be sorted by u for
        // the derivative grid to be valid. v = ln y = 1 - 2u is exact.
        let spec = DgpSpec::Gompertz;
        let train = clean_grid(&spec, 0.0, 2.0, 200);
        let ood = clean_grid(&spec, 2.0, 10.0, 400);
        let report = delta_ood(
            &train,
            &ood,
            &FeatureMapSpec::NegExp,
            &LabelMapSpec::Log {
                policy: crate::transforms::ClampPolicy::Reject,
            },
            &DeltaLibrary::new(1, true, LibraryVariables::Coordinate),
            0.05,
            50,
        )
        .unwrap();
        assert_eq!(report.k_active, 1);
        assert!(report.delta_ood < 1e-3, "ood {}", report.delta_ood);
    }

    #[test]
    fn multidimensional_input_is_rejected() {
        let spec = DgpSpec::MassAction {
            feed: 0.5,
            decay: 0.1,
            rate: 1.0,
        };
        let region = crate::dgp::BoxRegion::cube(2, 0.4, 1.2);
        let mut stream = RandomStream::from_seed(1);
        let data =
            crate::dgp::sample_uniform(&spec, &region, 50, 0.0, &mut stream, WindowTag::Train)
                .unwrap();
        let err = delta_ood(
            &data,
            &data,
            &FeatureMapSpec::Raw,
            &LabelMapSpec::Identity,
            &DeltaLibrary::new(2, true, LibraryVariables::CoordinateAndState),
            0.05,
            50,
        )
        .unwrap_err();
        assert!(matches!(err, DiagnosticsError::DomainViolation { .. }));
    }
}
