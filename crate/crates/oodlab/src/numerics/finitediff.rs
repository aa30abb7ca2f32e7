//! Finite-difference differentiation on one-dimensional, possibly nonuniform
//! grids.
//!
//! All stencils are second-order accurate, which matters downstream: the
//! derivative-residual diagnostic compares fitted dynamics against these
//! estimates, and a first-order boundary stencil would leak O(h) error into
//! residuals that are otherwise at machine precision for low-degree data.

use super::{NumericsError, Result};

/// Accuracy of the one-sided stencils used at the first and last grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryOrder {
    /// Simple forward/backward slope, first-order accurate.
    First,
    /// Three-point one-sided stencil, second-order accurate.
    Second,
}

/// Estimates `df/dx` at every grid point from samples `f` on the strictly
/// increasing grid `x`.
///
/// Interior points use the three-point stencil for nonuniform spacing, which
/// is exact for quadratics. With `BoundaryOrder::Second` (the default choice
/// throughout this crate) the endpoints are handled with one-sided
/// three-point stencils that keep the same order of accuracy; grids with only
/// two points fall back to the single slope.
pub fn finite_difference_derivative(
    x: &[f64],
    f: &[f64],
    boundary: BoundaryOrder,
) -> Result<Vec<f64>> {
    let n = x.len();
    if f.len() != n {
        return Err(NumericsError::ShapeMismatch {
            context: format!("grid has {n} points but values have {}", f.len()),
        });
    }
    if n < 2 {
        return Err(NumericsError::TooFewPoints {
            context: "finite differences",
            required: 2,
            actual: n,
        });
    }
    for i in 1..n {
        if !(x[i] > x[i - 1]) {
            return Err(NumericsError::GridNotMonotone { index: i });
        }
    }

    if n == 2 {
        let slope = (f[1] - f[0]) / (x[1] - x[0]);
        return Ok(vec![slope; 2]);
    }

    let mut d = vec![0.0; n];
    for i in 1..(n - 1) {
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        // Derivative of the parabola through the three neighbors, evaluated at
        // the middle point. Reduces to the central difference when hl == hr.
        d[i] = (f[i + 1] * hl * hl - f[i - 1] * hr * hr + f[i] * (hr * hr - hl * hl))
            / (hl * hr * (hl + hr));
    }

    match boundary {
        BoundaryOrder::First => {
            d[0] = (f[1] - f[0]) / (x[1] - x[0]);
            d[n - 1] = (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
        }
        BoundaryOrder::Second => {
            d[0] = one_sided(x[0], (x[0], f[0]), (x[1], f[1]), (x[2], f[2]));
            d[n - 1] = one_sided(
                x[n - 1],
                (x[n - 3], f[n - 3]),
                (x[n - 2], f[n - 2]),
                (x[n - 1], f[n - 1]),
            );
        }
    }
    Ok(d)
}

/// Derivative at `at` of the quadratic interpolating three points.
fn one_sided(at: f64, p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    let (x0, f0) = p0;
    let (x1, f1) = p1;
    let (x2, f2) = p2;
    // Differentiate the Lagrange form: each basis polynomial is a product of
    // two linear factors, so its derivative is the sum of the two factors.
    f0 * (2.0 * at - x1 - x2) / ((x0 - x1) * (x0 - x2))
        + f1 * (2.0 * at - x0 - x2) / ((x1 - x0) * (x1 - x2))
        + f2 * (2.0 * at - x0 - x1) / ((x2 - x0) * (x2 - x1))
}
