use crate::numerics::{spd_factorize, Matrix, SpdFactorization};
use crate::Result;

/// Solver for `(XᵀX + s·I)·c = w` with a fixed dictionary `X` (d×n) and
/// shift `s > 0`.
///
/// When `n ≤ d` the n×n system is factorized directly. Otherwise the d×d
/// matrix `F = XXᵀ + s·I` is factorized and solves go through
///
/// ```text
/// (XᵀX + sI)⁻¹·w = (w − Xᵀ·F⁻¹·X·w) / s
/// X·(XᵀX + sI)⁻¹·w = F⁻¹·X·w
/// ```
///
/// so a solve costs `O(nd + d²)` instead of `O(n²)`.
#[derive(Clone, Debug)]
pub(crate) enum ShiftedGram {
    Coefficient { shift: f64, factor: SpdFactorization },
    Feature { shift: f64, factor: SpdFactorization },
}

impl ShiftedGram {
    /// `cross` is `XᵀX` when `n ≤ d` and `XXᵀ` otherwise.
    pub(crate) fn new(x: &Matrix, cross: &Matrix, shift: f64) -> Result<Self> {
        let factor = spd_factorize(&cross.add_identity(shift)?)?;
        Ok(if uses_feature_space(x) {
            Self::Feature { shift, factor }
        } else {
            Self::Coefficient { shift, factor }
        })
    }

    pub(crate) fn shift(&self) -> f64 {
        match self {
            Self::Coefficient { shift, .. } | Self::Feature { shift, .. } => *shift,
        }
    }

    /// Writes `(XᵀX + sI)⁻¹·w` into `out` and `X·out` into `image`.
    pub(crate) fn solve_with_image(&self, x: &Matrix, w: &[f64], out: &mut [f64], image: &mut [f64]) {
        match self {
            Self::Coefficient { factor, .. } => {
                out.copy_from_slice(w);
                factor.solve_in_place(out);
                mul_into(x, out, image);
            }
            Self::Feature { shift, factor } => {
                mul_into(x, w, image);
                factor.solve_in_place(image);
                for ((o, col), wi) in out.iter_mut().zip(x.columns()).zip(w) {
                    *o = (wi - crate::numerics::dot(col, image)) / shift;
                }
            }
        }
    }

    /// `(XᵀX + sI)⁻¹·Xᵀ·y`, computed as `Xᵀ·(XXᵀ + sI)⁻¹·y` in feature space.
    pub(crate) fn ridge(&self, x: &Matrix, y: &[f64]) -> Vec<f64> {
        match self {
            Self::Coefficient { factor, .. } => {
                let mut c: Vec<f64> = x.columns().map(|col| crate::numerics::dot(col, y)).collect();
                factor.solve_in_place(&mut c);
                c
            }
            Self::Feature { factor, .. } => {
                let mut u = y.to_vec();
                factor.solve_in_place(&mut u);
                x.columns().map(|col| crate::numerics::dot(col, &u)).collect()
            }
        }
    }
}

pub(crate) fn uses_feature_space(x: &Matrix) -> bool {
    x.cols() > x.rows()
}

/// `out = X·v`
pub(crate) fn mul_into(x: &Matrix, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (col, &vj) in x.columns().zip(v) {
        if vj != 0.0 {
            for (o, a) in out.iter_mut().zip(col) {
                *o += a * vj;
            }
        }
    }
}
