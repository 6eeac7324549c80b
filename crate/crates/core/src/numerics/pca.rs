use super::{dot, norm2, Matrix, Vector};
use crate::{Error, Result};

/// Linear projection onto the leading principal directions of a sample set.
#[derive(Clone, Debug, PartialEq)]
pub struct PcaModel {
    mean: Vector,
    /// `input_dim × output_dim`, orthonormal columns.
    basis: Matrix,
    /// Sample variance captured by each basis column, descending.
    variances: Vec<f64>,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn output_dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn mean(&self) -> &Vector {
        &self.mean
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn project(&self, v: &[f64]) -> Result<Vector> {
        pca_project(self, v)
    }

    /// Projects every column of `data`.
    pub fn project_columns(&self, data: &Matrix) -> Result<Matrix> {
        let mut out = Vec::with_capacity(data.cols() * self.output_dim());
        for col in data.columns() {
            out.extend(self.project(col)?.into_vec());
        }
        Matrix::from_col_major(self.output_dim(), data.cols(), out)
    }
}

/// Fits a PCA model on the columns of `data` (one sample per column).
///
/// The eigenproblem is solved on whichever of the `d×d` covariance or the
/// `m×m` sample Gram matrix is smaller. Variances use the `m − 1`
/// denominator (`1` when there is a single sample).
pub fn pca_fit(data: &Matrix, target_dim: usize) -> Result<PcaModel> {
    let (d, m) = (data.rows(), data.cols());
    let max = d.min(m);
    if target_dim == 0 || target_dim > max {
        return Err(Error::DimensionTooLarge { requested: target_dim, max });
    }

    let mut mean = vec![0.0; d];
    for col in data.columns() {
        for (acc, x) in mean.iter_mut().zip(col) {
            *acc += x;
        }
    }
    mean.iter_mut().for_each(|x| *x /= m as f64);

    let centered: Vec<f64> = data
        .columns()
        .flat_map(|col| col.iter().zip(&mean).map(|(x, mu)| x - mu))
        .collect();
    let centered = Matrix::from_col_major_unchecked(d, m, centered);
    let denom = m.saturating_sub(1).max(1) as f64;

    let (mut directions, eigenvalues) = if d <= m {
        let (values, vectors) = sorted_eigen(&centered.outer_gram());
        let dirs: Vec<Vec<f64>> = (0..target_dim).map(|j| vectors.column(j).to_vec()).collect();
        (dirs, values[..target_dim].to_vec())
    } else {
        // Left singular vectors from the Gram eigenpairs: u = C·v / ‖C·v‖.
        let (values, vectors) = sorted_eigen(&centered.gram());
        let cutoff = 1e-12 * values.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
        let mut dirs = Vec::with_capacity(target_dim);
        let mut vals = Vec::with_capacity(target_dim);
        for j in 0..target_dim {
            if values[j] <= cutoff {
                break;
            }
            let u = centered.mul_vec(vectors.column(j))?.into_vec();
            dirs.push(u);
            vals.push(values[j]);
        }
        vals.resize(target_dim, 0.0);
        (dirs, vals)
    };

    orthonormalize(&mut directions, d);
    complete_basis(&mut directions, d, target_dim);
    for dir in &mut directions {
        fix_sign(dir);
    }

    let variances = eigenvalues.iter().map(|&e| e.max(0.0) / denom).collect();
    let basis = Matrix::from_columns(&directions)?;
    Ok(PcaModel { mean: Vector::from_unchecked(mean), basis, variances })
}

/// `basisᵀ·(v − mean)`
pub fn pca_project(model: &PcaModel, v: &[f64]) -> Result<Vector> {
    if v.len() != model.input_dim() {
        return Err(Error::LengthMismatch { expected: model.input_dim(), actual: v.len() });
    }
    let shifted: Vec<f64> = v.iter().zip(model.mean.iter()).map(|(x, mu)| x - mu).collect();
    model.basis.tr_mul_vec(&shifted)
}

/// Eigenpairs of a symmetric matrix ordered by descending eigenvalue.
fn sorted_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.rows();
    let eig = nalgebra::SymmetricEigen::new(a.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut data = Vec::with_capacity(n * n);
    for &i in &order {
        data.extend(eig.eigenvectors.column(i).iter());
    }
    (values, Matrix::from_col_major_unchecked(n, n, data))
}

/// Modified Gram-Schmidt in place; drops vectors that collapse to zero.
fn orthonormalize(vectors: &mut Vec<Vec<f64>>, dim: usize) {
    let mut kept: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for mut v in vectors.drain(..) {
        debug_assert_eq!(v.len(), dim);
        let scale = norm2(&v);
        for _ in 0..2 {
            for q in &kept {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= p * qi);
            }
        }
        let norm = norm2(&v);
        if norm > 1e-10 * scale.max(f64::MIN_POSITIVE) && norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            kept.push(v);
        }
    }
    *vectors = kept;
}

/// Extends an orthonormal set to `target` vectors with standard basis
/// directions (used for zero-variance components).
fn complete_basis(vectors: &mut Vec<Vec<f64>>, dim: usize, target: usize) {
    for axis in 0..dim {
        if vectors.len() >= target {
            break;
        }
        let mut v = vec![0.0; dim];
        v[axis] = 1.0;
        for _ in 0..2 {
            for q in vectors.iter() {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= p * qi);
            }
        }
        let norm = norm2(&v);
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            vectors.push(v);
        }
    }
}

/// Makes the entry of largest magnitude positive so bases are reproducible.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() + 1e-12 {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}
