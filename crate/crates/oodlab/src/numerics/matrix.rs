//! Validated dense containers.
//!
//! `Matrix` and `Vector` wrap `ndarray` storage and enforce one invariant at
//! construction: every entry is finite. Downstream code can therefore treat
//! NaN/inf as impossible inputs and only worry about them where they can be
//! produced (diverging optimizers, degenerate denominators).

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use super::{NumericsError, Result};

/// Row-major dense matrix with all-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Array2<f64>,
}

/// Dense vector with all-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    data: Array1<f64>,
}

impl Matrix {
    pub fn from_array(data: Array2<f64>) -> Result<Self> {
        for ((r, c), v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(NumericsError::NonFinite { row: r, col: c });
            }
        }
        Ok(Self { data })
    }

    /// Builds from a flat row-major buffer of length `rows * cols`.
    pub fn from_shape_vec(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        let data = Array2::from_shape_vec((rows, cols), values).map_err(|e| {
            NumericsError::ShapeMismatch {
                context: format!("matrix {rows}x{cols}: {e}"),
            }
        })?;
        Self::from_array(data)
    }

    /// Builds from equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(nrows * ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(NumericsError::ShapeMismatch {
                    context: format!("row {i} has {} entries, expected {ncols}", row.len()),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_shape_vec(nrows, ncols, flat)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[(row, col)]
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.data.view()
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn column(&self, col: usize) -> Vector {
        Vector {
            data: self.data.column(col).to_owned(),
        }
    }

    pub fn row(&self, row: usize) -> Vec<f64> {
        self.data.row(row).to_vec()
    }

    /// Stacks `self | other` side by side.
    pub fn hstack(&self, other: &Matrix) -> Result<Matrix> {
        if self.nrows() != other.nrows() {
            return Err(NumericsError::ShapeMismatch {
                context: format!(
                    "hstack of {}x{} with {}x{}",
                    self.nrows(),
                    self.ncols(),
                    other.nrows(),
                    other.ncols()
                ),
            });
        }
        let data = ndarray::concatenate(Axis(1), &[self.data.view(), other.data.view()])
            .expect("shapes checked above");
        Ok(Matrix { data })
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        Matrix {
            data: self.data.select(Axis(0), rows),
        }
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Matrix {
        Matrix {
            data: self.data.select(Axis(1), cols),
        }
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if self.ncols() != v.len() {
            return Err(NumericsError::ShapeMismatch {
                context: format!(
                    "matvec of {}x{} with vector of length {}",
                    self.nrows(),
                    self.ncols(),
                    v.len()
                ),
            });
        }
        Ok(Vector {
            data: self.data.dot(&v.data),
        })
    }
}

impl Vector {
    pub fn from_array(data: Array1<f64>) -> Result<Self> {
        for (i, v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(NumericsError::NonFinite { row: i, col: 0 });
            }
        }
        Ok(Self { data })
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        Self::from_array(Array1::from_vec(values.to_vec()))
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            data: Array1::zeros(len),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.data[i]
    }

    pub fn view(&self) -> ArrayView1<'_, f64> {
        self.data.view()
    }

    pub fn array(&self) -> &Array1<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array1<f64> {
        self.data
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice().expect("vectors are contiguous")
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.data.to_vec()
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.data.dot(&other.data)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let err = Matrix::from_shape_vec(2, 2, vec![1.0, 2.0, f64::NAN, 4.0]).unwrap_err();
        match err {
            NumericsError::NonFinite { row, col } => assert_eq!((row, col), (1, 0)),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(Vector::from_slice(&[0.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0]]).unwrap_err();
        assert!(matches!(err, NumericsError::ShapeMismatch { .. }));
    }

    #[test]
    fn hstack_and_select() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = Matrix::from_rows(&[vec![5.0], vec![6.0]]).unwrap();
        let ab = a.hstack(&b).unwrap();
        assert_eq!(ab.ncols(), 3);
        assert_eq!(ab.get(1, 2), 6.0);
        let sub = ab.select_rows(&[1]);
        assert_eq!(sub.row(0), vec![3.0, 4.0, 6.0]);
        let cols = ab.select_cols(&[2, 0]);
        assert_eq!(cols.row(0), vec![5.0, 1.0]);
    }

    #[test]
    fn matvec_checks_shapes() {
        let a = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        let v = Vector::from_slice(&[3.0, 4.0]).unwrap();
        assert_eq!(a.matvec(&v).unwrap().to_vec(), vec![3.0, 8.0]);
        let w = Vector::from_slice(&[1.0]).unwrap();
        assert!(a.matvec(&w).is_err());
    }
}
