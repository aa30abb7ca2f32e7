//! Least-squares solvers.
//!
//! `solve_least_squares` is the strict solver used for model fitting: it
//! factors the design with column-pivoted Householder QR and refuses
//! rank-deficient inputs, so collinear feature sets surface as errors instead
//! of silently unstable coefficients. The returned solution `w` satisfies the
//! normal equations to working precision: `||A^T (A w - b)|| <= 1e-8 ||A^T b||`
//! on any well-scaled problem.
//!
//! `min_norm_least_squares` is the permissive solver used inside sparse
//! regression, where candidate libraries routinely contain exactly dependent
//! columns (duplicated coordinates, trigonometric identities). It returns the
//! minimum-norm solution, which distributes weight evenly across exact
//! duplicates instead of failing.

use ndarray::{Array1, Array2};

use super::{Matrix, NumericsError, Result, Vector};

/// Relative pivot threshold below which a design is declared rank deficient.
const PIVOT_RTOL: f64 = 1e-12;

/// Relative eigenvalue cutoff for the pseudo-inverse in the min-norm solver.
const EIG_RTOL: f64 = 1e-12;

/// Solves `min_w ||A w - b||_2` for a full-column-rank `A` (n >= p).
///
/// Errors with `RankDeficient` when any pivot of the column-pivoted QR
/// factorization falls below `1e-12` times the leading pivot.
pub fn solve_least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.nrows();
    let p = a.ncols();
    if b.len() != n {
        return Err(NumericsError::ShapeMismatch {
            context: format!("design is {n}x{p} but target has length {}", b.len()),
        });
    }
    if n < p {
        return Err(NumericsError::ShapeMismatch {
            context: format!("underdetermined system: {n} rows < {p} columns"),
        });
    }
    if p == 0 {
        return Ok(Vector::zeros(0));
    }

    let mut r = a.array().clone();
    let mut qtb = b.array().clone();
    let mut perm: Vec<usize> = (0..p).collect();

    for k in 0..p {
        // Pivot: bring the remaining column with the largest norm below row k
        // to position k.
        let mut best = k;
        let mut best_norm = 0.0;
        for j in k..p {
            let nrm: f64 = (k..n).map(|i| r[(i, j)] * r[(i, j)]).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if best != k {
            for i in 0..n {
                r.swap((i, k), (i, best));
            }
            perm.swap(k, best);
        }

        // Householder reflector for column k.
        let alpha: f64 = best_norm.sqrt();
        let rkk = r[(k, k)];
        let beta = if rkk >= 0.0 { -alpha } else { alpha };
        let denom = rkk - beta;
        if denom.abs() > 0.0 && alpha > 0.0 {
            // v = (x - beta e1) / (x_k - beta), so v_k = 1.
            let mut v = vec![0.0; n - k];
            v[0] = 1.0;
            for i in (k + 1)..n {
                v[i - k] = r[(i, k)] / denom;
            }
            let vtv: f64 = v.iter().map(|x| x * x).sum();
            let tau = 2.0 / vtv;
            for j in k..p {
                let dot: f64 = (k..n).map(|i| v[i - k] * r[(i, j)]).sum();
                let s = tau * dot;
                for i in k..n {
                    r[(i, j)] -= s * v[i - k];
                }
            }
            let dot: f64 = (k..n).map(|i| v[i - k] * qtb[i]).sum();
            let s = tau * dot;
            for i in k..n {
                qtb[i] -= s * v[i - k];
            }
            r[(k, k)] = beta;
            for i in (k + 1)..n {
                r[(i, k)] = 0.0;
            }
        }
    }

    // With column pivoting the diagonal of R is non-increasing in magnitude.
    let leading = r[(0, 0)].abs();
    for k in 0..p {
        let pivot = r[(k, k)].abs();
        if pivot < PIVOT_RTOL * leading || leading == 0.0 {
            return Err(NumericsError::RankDeficient {
                column: perm[k],
                pivot,
                leading,
                tol: PIVOT_RTOL,
            });
        }
    }

    // Back-substitution on R w' = (Q^T b)[..p], then undo the permutation.
    let mut w_perm = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = qtb[k];
        for j in (k + 1)..p {
            s -= r[(k, j)] * w_perm[j];
        }
        w_perm[k] = s / r[(k, k)];
    }
    let mut w = vec![0.0; p];
    for (k, &col) in perm.iter().enumerate() {
        w[col] = w_perm[k];
    }
    Vector::from_slice(&w)
}

/// Solves `min ||w||_2` over all minimizers of `||A w - b||_2`.
///
/// Works for any column count and rank. Exactly duplicated columns receive
/// equal coefficients; directions with (relative) singular value below
/// `1e-12` are projected out.
pub fn min_norm_least_squares(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.nrows();
    let p = a.ncols();
    if b.len() != n {
        return Err(NumericsError::ShapeMismatch {
            context: format!("design is {n}x{p} but target has length {}", b.len()),
        });
    }
    if p == 0 {
        return Ok(Vector::zeros(0));
    }

    let at = a.array().t();
    let gram: Array2<f64> = at.dot(a.array());
    let rhs: Array1<f64> = at.dot(b.array());

    let (eigvals, eigvecs) = jacobi_eigh(&gram);
    let max_eig = eigvals.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    let mut w = Array1::<f64>::zeros(p);
    if max_eig == 0.0 {
        return Vector::from_array(w);
    }
    for (j, &lam) in eigvals.iter().enumerate() {
        if lam > EIG_RTOL * max_eig {
            let v = eigvecs.column(j);
            let coef = v.dot(&rhs) / lam;
            for i in 0..p {
                w[i] += coef * v[i];
            }
        }
    }
    Vector::from_array(w)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors in the columns of
/// the returned matrix, `G = V diag(lambda) V^T`. Intended for the small Gram
/// matrices of candidate libraries (tens of columns), where its quadratic
/// convergence makes it both simple and robust.
fn jacobi_eigh(g: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let p = g.nrows();
    let mut a = g.clone();
    let mut v = Array2::<f64>::eye(p);
    let frob: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = 1e-15 * frob.max(f64::MIN_POSITIVE);

    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..p {
            for j in (i + 1)..p {
                off += a[(i, j)] * a[(i, j)];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for i in 0..p {
            for j in (i + 1)..p {
                let apq = a[(i, j)];
                if apq.abs() <= tol / (p as f64) {
                    continue;
                }
                let app = a[(i, i)];
                let aqq = a[(j, j)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..p {
                    let aik = a[(i, k)];
                    let ajk = a[(j, k)];
                    a[(i, k)] = c * aik - s * ajk;
                    a[(j, k)] = s * aik + c * ajk;
                }
                for k in 0..p {
                    let aki = a[(k, i)];
                    let akj = a[(k, j)];
                    a[(k, i)] = c * aki - s * akj;
                    a[(k, j)] = s * aki + c * akj;
                }
                for k in 0..p {
                    let vki = v[(k, i)];
                    let vkj = v[(k, j)];
                    v[(k, i)] = c * vki - s * vkj;
                    v[(k, j)] = s * vki + c * vkj;
                }
            }
        }
    }
    let eig = (0..p).map(|i| a[(i, i)]).collect();
    (eig, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn design(rows: &[Vec<f64>]) -> Matrix {
        Matrix::from_rows(rows).unwrap()
    }

    #[test]
    fn recovers_exact_coefficients() {
        // y = 3 + 2 x over a handful of points, with an explicit bias column.
        let xs = [0.0, 0.5, 1.0, 2.0, 3.5];
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![1.0, x]).collect();
        let a = design(&rows);
        let b = Vector::from_slice(&xs.map(|x| 3.0 + 2.0 * x)).unwrap();
        let w = solve_least_squares(&a, &b).unwrap();
        assert_abs_diff_eq!(w.get(0), 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(w.get(1), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn residual_is_orthogonal_to_column_space() {
        // Overdetermined noisy-ish system; check A^T (A w - b) ~ 0.
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let x = i as f64 / 7.0 - 2.0;
                vec![1.0, x, x * x, (x * 1.7).sin()]
            })
            .collect();
        let a = design(&rows);
        let b = Vector::from_slice(
            &(0..40)
                .map(|i| ((i * i) as f64).sin() + i as f64 * 0.1)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let w = solve_least_squares(&a, &b).unwrap();
        let resid = &a.array().dot(w.array()) - b.array();
        let atr = a.array().t().dot(&resid);
        let atb = a.array().t().dot(b.array());
        let lhs = atr.dot(&atr).sqrt();
        let rhs = atb.dot(&atb).sqrt();
        assert!(lhs <= 1e-8 * rhs, "normal-equation residual {lhs} vs {rhs}");
    }

    #[test]
    fn detects_rank_deficiency() {
        // Third column is the sum of the first two.
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let x = i as f64;
                vec![1.0, x, 1.0 + x]
            })
            .collect();
        let a = design(&rows);
        let b = Vector::from_slice(&[0.0; 10]).unwrap();
        match solve_least_squares(&a, &b) {
            Err(NumericsError::RankDeficient { .. }) => {}
            other => panic!("expected RankDeficient, got {other:?}"),
        }
    }

    #[test]
    fn min_norm_splits_duplicate_columns_evenly() {
        let xs: Vec<f64> = (0..20).map(|i| (i as f64 * 0.37).sin()).collect();
        let rows: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x, x]).collect();
        let a = design(&rows);
        let b = Vector::from_slice(&xs.iter().map(|&x| -x).collect::<Vec<_>>()).unwrap();
        let w = min_norm_least_squares(&a, &b).unwrap();
        assert_abs_diff_eq!(w.get(0), -0.5, epsilon = 1e-10);
        assert_abs_diff_eq!(w.get(1), -0.5, epsilon = 1e-10);
    }

    #[test]
    fn min_norm_matches_qr_on_full_rank_systems() {
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|i| {
                let x = i as f64 / 5.0;
                vec![1.0, x, (x).cos()]
            })
            .collect();
        let a = design(&rows);
        let b = Vector::from_slice(
            &(0..30)
                .map(|i| (i as f64 / 5.0) * 2.0 - 1.0 + (i as f64).sin() * 0.01)
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let w1 = solve_least_squares(&a, &b).unwrap();
        let w2 = min_norm_least_squares(&a, &b).unwrap();
        for i in 0..3 {
            assert_abs_diff_eq!(w1.get(i), w2.get(i), epsilon = 1e-8);
        }
    }

    #[test]
    fn jacobi_diagonalizes_known_matrix() {
        // Eigenvalues of [[2,1],[1,2]] are 1 and 3.
        let g = ndarray::arr2(&[[2.0, 1.0], [1.0, 2.0]]);
        let (mut eig, _) = jacobi_eigh(&g);
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(eig[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig[1], 3.0, epsilon = 1e-12);
    }
}
