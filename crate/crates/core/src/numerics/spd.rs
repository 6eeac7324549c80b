use super::{Matrix, Vector};
use crate::{Error, Result};

/// Relative symmetry tolerance for factorization input. Products such as
/// `XᵀX` are symmetric only up to rounding.
const SYMMETRY_TOL: f64 = 1e-10;

/// Cholesky factor `A = L·Lᵀ` of a symmetric positive-definite matrix, kept
/// for repeated solves against the same `A`.
#[derive(Clone, Debug)]
pub struct SpdFactorization {
    n: usize,
    // Lower triangle, column-major; entries above the diagonal are zero.
    lower: Vec<f64>,
}

pub fn spd_factorize(a: &Matrix) -> Result<SpdFactorization> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    for j in 0..n {
        for i in (j + 1)..n {
            let (x, y) = (a.get(i, j), a.get(j, i));
            let gap = (x - y).abs();
            if gap > SYMMETRY_TOL * x.abs().max(y.abs()).max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j, gap });
            }
        }
    }

    let mut lower = vec![0.0; n * n];
    for j in 0..n {
        // Lower part of column j of A; symmetrize by reading the lower triangle only.
        let mut col: Vec<f64> = (j..n).map(|i| a.get(i, j)).collect();
        for k in 0..j {
            let ljk = lower[k * n + j];
            if ljk == 0.0 {
                continue;
            }
            let lk = &lower[k * n + j..(k + 1) * n];
            for (c, l) in col.iter_mut().zip(lk) {
                *c -= l * ljk;
            }
        }
        let pivot = col[0];
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { pivot: j, value: pivot });
        }
        let diag = pivot.sqrt();
        let out = &mut lower[j * n + j..(j + 1) * n];
        out[0] = diag;
        for (o, c) in out.iter_mut().zip(&col).skip(1) {
            *o = c / diag;
        }
    }
    Ok(SpdFactorization { n, lower })
}

impl SpdFactorization {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vector> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: b.len() });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(Vector::from_unchecked(x))
    }

    /// Overwrites `b` with `A⁻¹·b`.
    ///
    /// # Panics
    /// If `b.len()` differs from the factorized dimension.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n, "right-hand side length");
        // L·w = b
        for j in 0..n {
            let col = &self.lower[j * n + j..(j + 1) * n];
            let wj = b[j] / col[0];
            b[j] = wj;
            if wj != 0.0 {
                for (bi, l) in b[j + 1..].iter_mut().zip(&col[1..]) {
                    *bi -= l * wj;
                }
            }
        }
        // Lᵀ·x = w
        for j in (0..n).rev() {
            let col = &self.lower[j * n + j..(j + 1) * n];
            let s = super::dot(&b[j + 1..], &col[1..]);
            b[j] = (b[j] - s) / col[0];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::dense_solve;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let cols: Vec<Vec<f64>> =
            (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let b = Matrix::from_columns(&cols).unwrap();
        b.gram().add_identity(0.1).unwrap()
    }

    fn residual_inf(a: &Matrix, x: &[f64], b: &[f64]) -> f64 {
        let ax = a.mul_vec(x).unwrap();
        crate::numerics::dist_inf(&ax, b)
    }

    #[test]
    fn identity_solve_is_identity() {
        let f = spd_factorize(&Matrix::identity(2)).unwrap();
        assert_eq!(f.solve(&[1.0, 2.0]).unwrap().as_slice(), &[1.0, 2.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = Matrix::from_rows(&[[2.0, 0.0], [0.0, 4.0]]).unwrap();
        let x = spd_factorize(&a).unwrap().solve(&[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_elimination_on_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_spd(5, &mut rng);
        let b: Vec<f64> = (0..5).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x = spd_factorize(&a).unwrap().solve(&b).unwrap();
        let oracle = dense_solve(&a, &b).unwrap();
        assert!(crate::numerics::dist_inf(&x, &oracle) <= 1e-10);
    }

    #[test]
    fn residual_bound_up_to_200() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 7, 40, 200] {
            let a = random_spd(n, &mut rng);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x = spd_factorize(&a).unwrap().solve(&b).unwrap();
            let bound = 1e-8 * (1.0 + crate::numerics::norm_inf(&b));
            assert!(residual_inf(&a, &x, &b) <= bound, "n = {n}");
            let oracle = dense_solve(&a, &b).unwrap();
            let rel = crate::numerics::dist_inf(&x, &oracle) / crate::numerics::norm_inf(&oracle);
            assert!(rel <= 1e-8, "n = {n}: relative gap {rel:e}");
        }
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let indefinite = Matrix::from_rows(&[[1.0, 2.0], [2.0, 1.0]]).unwrap();
        assert!(matches!(spd_factorize(&indefinite), Err(Error::NotPositiveDefinite { pivot: 1, .. })));
        let asym = Matrix::from_rows(&[[1.0, 0.5], [0.4, 1.0]]).unwrap();
        assert!(matches!(spd_factorize(&asym), Err(Error::NotSymmetric { .. })));
        let rect = Matrix::zeros(2, 3);
        assert!(matches!(spd_factorize(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn tolerates_rounding_asymmetry() {
        let a = Matrix::from_rows(&[[2.0, 1.0 + 1e-14], [1.0, 2.0]]).unwrap();
        assert!(spd_factorize(&a).is_ok());
    }
}
