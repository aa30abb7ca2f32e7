//! STLSQ sparse regression over a polynomial term library.

use serde::{Deserialize, Serialize};

use super::{ModelError, Predictor};
use crate::numerics::{min_norm_least_squares, Matrix, Vector};

/// Multivariate polynomial term library up to a total degree.
///
/// Terms are ordered by total degree, then by descending exponent of the
/// earlier inputs, e.g. for inputs (u, v) and degree 2 with bias:
/// 1, u, v, u^2, u*v, v^2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialLibrary {
    pub degree: usize,
    pub include_bias: bool,
    pub input_names: Vec<String>,
}

impl PolynomialLibrary {
    pub fn new(degree: usize, include_bias: bool, input_names: &[&str]) -> Self {
        Self {
            degree,
            include_bias,
            input_names: input_names.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.input_names.len()
    }

    /// Exponent vectors of every term, one entry per input.
    pub fn exponents(&self) -> Vec<Vec<u32>> {
        let p = self.input_dim();
        let mut all = Vec::new();
        let start = if self.include_bias { 0 } else { 1 };
        for total in start..=self.degree {
            let mut current = vec![0u32; p];
            compositions(total as u32, 0, &mut current, &mut all);
        }
        all
    }

    pub fn term_count(&self) -> usize {
        self.exponents().len()
    }

    pub fn term_names(&self) -> Vec<String> {
        self.exponents()
            .iter()
            .map(|exps| {
                let factors: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(j, &e)| {
                        if e == 1 {
                            self.input_names[j].clone()
                        } else {
                            format!("{}^{}", self.input_names[j], e)
                        }
                    })
                    .collect();
                if factors.is_empty() {
                    "1".to_string()
                } else {
                    factors.join("*")
                }
            })
            .collect()
    }

    /// Evaluates every term at every input row; result is n x term_count.
    pub fn design(&self, inputs: &Matrix) -> Result<Matrix, ModelError> {
        if inputs.ncols() != self.input_dim() {
            return Err(ModelError::DimensionMismatch {
                context: format!(
                    "library over {} inputs applied to {} columns",
                    self.input_dim(),
                    inputs.ncols()
                ),
            });
        }
        let exps = self.exponents();
        let n = inputs.nrows();
        let mut values = Vec::with_capacity(n * exps.len());
        for i in 0..n {
            for exp in &exps {
                let mut term = 1.0;
                for (j, &e) in exp.iter().enumerate() {
                    term *= inputs.get(i, j).powi(e as i32);
                }
                values.push(term);
            }
        }
        Matrix::from_shape_vec(n, exps.len(), values).map_err(ModelError::from)
    }
}

/// All exponent vectors with the given remaining total, filled from `pos`.
fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        current[pos] = 0;
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        compositions(remaining - e, pos + 1, current, out);
        current[pos] = 0;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StlsqOptions {
    pub threshold: f64,
    pub max_iter: usize,
}

impl Default for StlsqOptions {
    fn default() -> Self {
        Self {
            threshold: 0.05,
            max_iter: 50,
        }
    }
}

/// STLSQ output on a prebuilt design matrix.
///
/// Inactive coefficients are exactly zero; `k_active` counts the true
/// entries of `active_mask`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StlsqSolution {
    pub coefficients: Vec<f64>,
    pub active_mask: Vec<bool>,
    pub k_active: usize,
}

/// Sequentially thresholded least squares.
///
/// Each sweep deactivates coefficients below the threshold, then refits on
/// the surviving columns. An empty active set is a valid zero model, not an
/// error. The inner solver is minimum-norm least squares, so collinear
/// libraries resolve deterministically.
pub fn stlsq(
    design: &Matrix,
    targets: &Vector,
    options: &StlsqOptions,
) -> Result<StlsqSolution, ModelError> {
    let n = design.nrows();
    let l = design.ncols();
    if targets.len() != n {
        return Err(ModelError::DimensionMismatch {
            context: format!("{n} design rows but {} targets", targets.len()),
        });
    }
    if n < l {
        return Err(ModelError::TooFewSamples {
            context: format!("STLSQ on {l} library columns"),
            required: l,
            actual: n,
        });
    }
    if options.max_iter == 0 {
        return Err(ModelError::DimensionMismatch {
            context: "STLSQ max_iter must be at least 1".to_string(),
        });
    }

    let mut active = vec![true; l];
    let mut coeffs = min_norm_least_squares(design, targets)?.to_vec();
    for _ in 0..options.max_iter {
        let next: Vec<bool> = (0..l)
            .map(|j| active[j] && coeffs[j].abs() >= options.threshold)
            .collect();
        if next == active {
            break;
        }
        active = next;
        let kept: Vec<usize> = (0..l).filter(|&j| active[j]).collect();
        if kept.is_empty() {
            coeffs = vec![0.0; l];
            break;
        }
        let sub = design.select_cols(&kept);
        let sub_coeffs = min_norm_least_squares(&sub, targets)?;
        coeffs = vec![0.0; l];
        for (slot, &j) in kept.iter().enumerate() {
            coeffs[j] = sub_coeffs.get(slot);
        }
    }
    let k_active = active.iter().filter(|&&a| a).count();
    Ok(StlsqSolution {
        coefficients: coeffs,
        active_mask: active,
        k_active,
    })
}

/// STLSQ fit bound to the polynomial library that produced its design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SparseFit {
    pub library: PolynomialLibrary,
    pub coefficients: Vec<f64>,
    pub active_mask: Vec<bool>,
    pub k_active: usize,
    pub threshold: f64,
    pub max_iter: usize,
}

impl SparseFit {
    pub fn predict(&self, inputs: &Matrix) -> Result<Vector, ModelError> {
        let design = self.library.design(inputs)?;
        let xi = Vector::from_slice(&self.coefficients).expect("fit coefficients are finite");
        design.matvec(&xi).map_err(ModelError::from)
    }

    /// Surviving terms as (name, coefficient) pairs in library order.
    pub fn active_terms(&self) -> Vec<(String, f64)> {
        self.library
            .term_names()
            .into_iter()
            .zip(self.coefficients.iter())
            .zip(self.active_mask.iter())
            .filter(|(_, &active)| active)
            .map(|((name, &c), _)| (name, c))
            .collect()
    }
}

impl Predictor for SparseFit {
    fn predict_matrix(&self, features: &Matrix) -> Result<Matrix, ModelError> {
        let v = self.predict(features)?;
        let n = v.len();
        Matrix::from_shape_vec(n, 1, v.to_vec()).map_err(ModelError::from)
    }
}

pub fn fit_stlsq(
    library: &PolynomialLibrary,
    inputs: &Matrix,
    targets: &Vector,
    options: &StlsqOptions,
) -> Result<SparseFit, ModelError> {
    let design = library.design(inputs)?;
    let solution = stlsq(&design, targets, options)?;
    Ok(SparseFit {
        library: library.clone(),
        coefficients: solution.coefficients,
        active_mask: solution.active_mask,
        k_active: solution.k_active,
        threshold: options.threshold,
        max_iter: options.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use crate::numerics::RandomStream;

    #[test]
    fn term_enumeration_degree_two_bivariate() {
        let lib = PolynomialLibrary::new(2, true, &["u", "v"]);
        assert_eq!(lib.term_names(), ["1", "u", "v", "u^2", "u*v", "v^2"]);
        assert_eq!(lib.term_count(), 6);
    }

    #[test]
    fn term_count_matches_binomial() {
        // With bias, the count of monomials in p variables up to degree d
        // is C(d + p, p).
        let lib = PolynomialLibrary::new(9, true, &["s", "c"]);
        assert_eq!(lib.term_count(), 55);
        let no_bias = PolynomialLibrary::new(3, false, &["x"]);
        assert_eq!(no_bias.term_names(), ["x", "x^2", "x^3"]);
    }

    #[test]
    fn design_evaluates_terms() {
        let lib = PolynomialLibrary::new(2, true, &["u", "v"]);
        let inputs = Matrix::from_rows(&[vec![2.0, 3.0]]).unwrap();
        let design = lib.design(&inputs).unwrap();
        let row: Vec<f64> = (0..6).map(|j| design.get(0, j)).collect();
        assert_eq!(row, vec![1.0, 2.0, 3.0, 4.0, 6.0, 9.0]);
    }

    #[test]
    fn quadratic_target_activates_single_term() {
        let lib = PolynomialLibrary::new(2, true, &["x"]);
        let xs: Vec<f64> = (0..60).map(|i| 0.5 + i as f64 * 0.03).collect();
        let inputs = Matrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        let y = Vector::from_slice(&xs.iter().map(|&x| x * x).collect::<Vec<_>>()).unwrap();
        let fit = fit_stlsq(&lib, &inputs, &y, &StlsqOptions::default()).unwrap();
        assert_eq!(fit.k_active, 1);
        assert_eq!(fit.active_terms()[0].0, "x^2");
        assert_abs_diff_eq!(fit.active_terms()[0].1, 1.0, epsilon = 1e-10);
        assert_eq!(fit.coefficients[0], 0.0);
        assert_eq!(fit.coefficients[1], 0.0);
    }

    #[test]
    fn derivative_target_activates_linear_term() {
        let lib = PolynomialLibrary::new(2, true, &["x"]);
        let xs: Vec<f64> = (0..60).map(|i| 0.5 + i as f64 * 0.03).collect();
        let inputs = Matrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        let dz = Vector::from_slice(&xs.iter().map(|&x| 2.0 * x).collect::<Vec<_>>()).unwrap();
        let fit = fit_stlsq(&lib, &inputs, &dz, &StlsqOptions::default()).unwrap();
        assert_eq!(fit.k_active, 1);
        let terms = fit.active_terms();
        assert_eq!(terms[0].0, "x");
        assert_abs_diff_eq!(terms[0].1, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn zero_targets_give_zero_model() {
        let lib = PolynomialLibrary::new(3, true, &["x"]);
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.1).collect();
        let inputs = Matrix::from_rows(&xs.iter().map(|&x| vec![x]).collect::<Vec<_>>()).unwrap();
        let dz = Vector::zeros(30);
        let fit = fit_stlsq(&lib, &inputs, &dz, &StlsqOptions::default()).unwrap();
        assert_eq!(fit.k_active, 0);
        assert!(fit.coefficients.iter().all(|&c| c == 0.0));
        let pred = fit.predict(&inputs).unwrap();
        assert!(pred.to_vec().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn zero_threshold_single_sweep_is_plain_least_squares() {
        let mut stream = RandomStream::from_seed(3);
        let rows: Vec<Vec<f64>> = (0..40).map(|_| vec![stream.uniform(-2.0, 2.0)]).collect();
        let inputs = Matrix::from_rows(&rows).unwrap();
        let ys: Vec<f64> = rows
            .iter()
            .map(|r| 1.5 * r[0] - 0.3 * r[0] * r[0] + 0.01 * stream.normal())
            .collect();
        let y = Vector::from_slice(&ys).unwrap();
        let lib = PolynomialLibrary::new(3, true, &["x"]);
        let opts = StlsqOptions {
            threshold: 0.0,
            max_iter: 1,
        };
        let fit = fit_stlsq(&lib, &inputs, &y, &opts).unwrap();
        let design = lib.design(&inputs).unwrap();
        let plain = min_norm_least_squares(&design, &y).unwrap();
        assert_eq!(fit.k_active, 4);
        for j in 0..4 {
            assert_abs_diff_eq!(fit.coefficients[j], plain.get(j), epsilon = 1e-10);
        }
    }

    #[test]
    fn duplicate_columns_share_weight_evenly() {
        // Minimum-norm inner solves split a duplicated predictor evenly, so
        // both copies survive a threshold below half the true coefficient.
        let xs: Vec<f64> = (0..50).map(|i| -1.0 + i as f64 * 0.04).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x]).collect();
        let design = Matrix::from_rows(&rows).unwrap();
        let y = Vector::from_slice(&xs).unwrap();
        let sol = stlsq(&design, &y, &StlsqOptions::default()).unwrap();
        assert_eq!(sol.k_active, 2);
        assert_abs_diff_eq!(sol.coefficients[0], 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(sol.coefficients[1], 0.5, epsilon = 1e-8);
    }

    #[test]
    fn column_permutation_permutes_coefficients() {
        let mut stream = RandomStream::from_seed(9);
        let rows: Vec<Vec<f64>> = (0..80)
            .map(|_| {
                let x = stream.uniform(-2.0, 2.0);
                vec![1.0, x, x * x, x * x * x]
            })
            .collect();
        let design = Matrix::from_rows(&rows).unwrap();
        let y = Vector::from_slice(
            &rows.iter().map(|r| 2.0 * r[1] - 0.8 * r[2]).collect::<Vec<_>>(),
        )
        .unwrap();
        let opts = StlsqOptions::default();
        let base = stlsq(&design, &y, &opts).unwrap();
        let perm = [2usize, 0, 3, 1];
        let permuted = design.select_cols(&perm);
        let shuffled = stlsq(&permuted, &y, &opts).unwrap();
        for (slot, &j) in perm.iter().enumerate() {
            assert_abs_diff_eq!(
                shuffled.coefficients[slot],
                base.coefficients[j],
                epsilon = 1e-8
            );
            assert_eq!(shuffled.active_mask[slot], base.active_mask[j]);
        }
    }

    #[test]
    fn more_columns_than_rows_is_rejected() {
        let lib = PolynomialLibrary::new(5, true, &["x"]);
        let inputs = Matrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let y = Vector::from_slice(&[1.0, 2.0, 3.0]).unwrap();
        let err = fit_stlsq(&lib, &inputs, &y, &StlsqOptions::default()).unwrap_err();
        assert!(matches!(err, ModelError::TooFewSamples { .. }));
    }
}
