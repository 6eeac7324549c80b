//! Dense linear algebra used by the coding models.
//!
//! Matrices are stored column-major so that each sample (a column) is a
//! contiguous slice, and a class block of the dictionary is a contiguous
//! column range.

mod matrix;
mod pca;
mod spd;

pub use matrix::{Matrix, Vector};
pub use pca::{pca_fit, pca_project, PcaModel};
pub use spd::{spd_factorize, SpdFactorization};

use crate::{Error, Result};

/// Columns whose ℓ2 norm is at or below this are treated as zero.
pub const ZERO_NORM: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // Independent partial sums let the loop vectorize.
    const W: usize = 8;
    let (ca, cb) = (a.chunks_exact(W), b.chunks_exact(W));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    let mut acc = [0.0; W];
    for (x, y) in ca.zip(cb) {
        let (x, y): (&[f64; W], &[f64; W]) = (x.try_into().unwrap(), y.try_into().unwrap());
        for k in 0..W {
            acc[k] += x[k] * y[k];
        }
    }
    acc.iter().sum::<f64>() + tail
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `‖a − b‖∞`
pub fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Scales every column of `m` to unit ℓ2 norm.
pub fn normalize_columns(m: &Matrix) -> Result<Matrix> {
    let rows = m.rows();
    let mut data = Vec::with_capacity(m.as_slice().len());
    for (j, col) in m.columns().enumerate() {
        let norm = norm2(col);
        if norm <= ZERO_NORM {
            return Err(Error::ZeroColumn { index: j });
        }
        data.extend(col.iter().map(|x| x / norm));
    }
    Ok(Matrix::from_col_major_unchecked(rows, m.cols(), data))
}

/// Scales a single vector to unit ℓ2 norm; a zero vector is reported as
/// `ZeroColumn { index: 0 }`.
pub fn normalize_vector(v: &[f64]) -> Result<Vector> {
    let norm = norm2(v);
    if norm <= ZERO_NORM {
        return Err(Error::ZeroColumn { index: 0 });
    }
    Ok(Vector::from_unchecked(v.iter().map(|x| x / norm).collect()))
}
