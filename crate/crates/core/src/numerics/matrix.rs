use std::ops::{Deref, Range};

use crate::{Error, Result};

/// Dense real matrix, column-major, with at least one row and one column and
/// only finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, actual: data.len() });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns<C: AsRef<[f64]>>(columns: &[C]) -> Result<Self> {
        let rows = columns.first().map_or(0, |c| c.as_ref().len());
        let mut data = Vec::with_capacity(rows * columns.len());
        for c in columns {
            let c = c.as_ref();
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, actual: c.len() });
            }
            data.extend_from_slice(c);
        }
        Self::from_col_major(rows, columns.len(), data)
    }

    /// Builds a matrix from row slices; handy for small literals.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut data = vec![0.0; r * c];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, actual: row.len() });
            }
            for (j, &x) in row.iter().enumerate() {
                data[j * r + i] = x;
            }
        }
        Self::from_col_major(r, c, data)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// # Panics
    /// If either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub(crate) fn from_col_major_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.rows)
    }

    /// Contiguous storage of columns `range.start..range.end`.
    pub fn column_block(&self, range: Range<usize>) -> &[f64] {
        &self.data[range.start * self.rows..range.end * self.rows]
    }

    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.rows);
        for &j in indices {
            data.extend_from_slice(self.column(j));
        }
        Self::from_col_major(self.rows, indices.len(), data)
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for j in 0..self.cols {
            for i in 0..self.rows {
                data[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// `A·v`
    pub fn mul_vec(&self, v: &[f64]) -> Result<Vector> {
        self.check_len(v.len(), self.cols)?;
        let mut out = vec![0.0; self.rows];
        for (col, &vj) in self.columns().zip(v) {
            if vj != 0.0 {
                for (o, a) in out.iter_mut().zip(col) {
                    *o += a * vj;
                }
            }
        }
        Ok(Vector(out))
    }

    /// `Aᵀ·v`
    pub fn tr_mul_vec(&self, v: &[f64]) -> Result<Vector> {
        self.check_len(v.len(), self.rows)?;
        Ok(Vector(self.columns().map(|col| super::dot(col, v)).collect()))
    }

    /// `A·B`
    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_len(other.rows, self.cols)?;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for col in other.columns() {
            data.extend(self.mul_vec(col)?.0);
        }
        Ok(Self::from_col_major_unchecked(self.rows, other.cols, data))
    }

    /// `AᵀA`
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = super::dot(self.column(i), self.column(j));
                data[j * n + i] = v;
                data[i * n + j] = v;
            }
        }
        Self::from_col_major_unchecked(n, n, data)
    }

    /// `AAᵀ`
    pub fn outer_gram(&self) -> Matrix {
        let d = self.rows;
        let mut data = vec![0.0; d * d];
        for col in self.columns() {
            for (j, &cj) in col.iter().enumerate() {
                if cj == 0.0 {
                    continue;
                }
                let out = &mut data[j * d..(j + 1) * d];
                for (o, &ci) in out.iter_mut().zip(col) {
                    *o += ci * cj;
                }
            }
        }
        Self::from_col_major_unchecked(d, d, data)
    }

    /// `A + shift·I` for square `A`.
    pub fn add_identity(&self, shift: f64) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out.data[i * self.rows + i] += shift;
        }
        Ok(out)
    }

    /// Row sums, i.e. `A·1`.
    pub fn row_sums(&self) -> Vector {
        let mut out = vec![0.0; self.rows];
        for col in self.columns() {
            for (o, a) in out.iter_mut().zip(col) {
                *o += a;
            }
        }
        Vector(out)
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.rows, self.cols, &self.data)
    }

    fn check_len(&self, actual: usize, expected: usize) -> Result<()> {
        if actual == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected, actual })
        }
    }
}

/// Dense real vector with finite entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(data: Vec<f64>) -> Result<Self> {
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(data))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0.0; len])
    }

    pub(crate) fn from_unchecked(data: Vec<f64>) -> Self {
        debug_assert!(data.iter().all(|x| x.is_finite()));
        Self(data)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Vector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}
