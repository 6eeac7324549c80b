//! Brute-force references for the coding models.
//!
//! Everything here works from the raw dictionary matrix and shares no code
//! path with [`crate::solvers`], so agreement between the two is evidence
//! rather than tautology. Intended for tiny instances only.

use crate::numerics::{Matrix, Vector};
use crate::{Error, Result};

/// Largest number of atoms the exhaustive oracles accept.
pub const MAX_ATOMS: usize = 4;

/// Support threshold used to recover the equality multiplier.
pub const SUPPORT_THRESHOLD: f64 = 1e-6;

/// Solves `A·x = b` by Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &Matrix, b: &[f64]) -> Result<Vector> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::NotSquare { rows: n, cols: a.cols() });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: b.len() });
    }
    // Row-major working copy augmented with the right-hand side.
    let w = n + 1;
    let mut m = vec![0.0; n * w];
    for i in 0..n {
        for j in 0..n {
            m[i * w + j] = a.get(i, j);
        }
        m[i * w + n] = b[i];
    }
    let scale = a.as_slice().iter().fold(0.0f64, |s, x| s.max(x.abs())).max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| m[r * w + col].abs().total_cmp(&m[s * w + col].abs()))
            .expect("non-empty range");
        if m[pivot_row * w + col].abs() <= 1e-14 * scale {
            return Err(Error::SingularSystem);
        }
        if pivot_row != col {
            for j in 0..w {
                m.swap(col * w + j, pivot_row * w + j);
            }
        }
        let p = m[col * w + col];
        for r in (col + 1)..n {
            let f = m[r * w + col] / p;
            if f != 0.0 {
                for j in col..w {
                    m[r * w + j] -= f * m[col * w + j];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|j| m[i * w + j] * x[j]).sum();
        x[i] = (m[i * w + n] - s) / m[i * w + i];
    }
    Vector::new(x)
}

/// `‖y − Xc‖² + λ‖c‖²`, evaluated directly.
pub fn objective(x: &Matrix, y: &[f64], lambda: f64, c: &[f64]) -> f64 {
    let mut r = y.to_vec();
    for (col, &cj) in x.columns().zip(c) {
        for (ri, xi) in r.iter_mut().zip(col) {
            *ri -= xi * cj;
        }
    }
    r.iter().map(|v| v * v).sum::<f64>() + lambda * c.iter().map(|v| v * v).sum::<f64>()
}

/// Best point of the simplex lattice `{c : c_i ∈ step·ℕ, 1ᵀc = 1}` for the
/// ANCR objective. The step is snapped to `1/round(1/step)` so the lattice
/// contains the vertices.
pub fn grid_qp_simplex(x: &Matrix, y: &[f64], lambda: f64, step: f64) -> Result<(Vector, f64)> {
    let n = x.cols();
    if n > MAX_ATOMS {
        return Err(Error::TooManyAtoms { max: MAX_ATOMS, actual: n });
    }
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidConfig(format!("grid step must lie in (0, 0.5], got {step}")));
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch { expected: x.rows(), actual: y.len() });
    }
    let (q, b, yy) = quadratic_form(x, y, lambda);
    let ticks = (1.0 / step).round() as usize;
    let h = 1.0 / ticks as f64;

    let mut best = (f64::INFINITY, vec![0.0; n]);
    let mut counts = vec![0usize; n];
    visit_compositions(&mut counts, 0, ticks, &mut |k| {
        let c: Vec<f64> = k.iter().map(|&t| t as f64 * h).collect();
        let f = eval_quadratic(&q, &b, yy, &c);
        if f < best.0 {
            best = (f, c);
        }
    });
    Ok((Vector::new(best.1)?, best.0))
}

/// Max-norm stationarity residual of `c` for the ANCR problem.
///
/// The equality multiplier `μ` is recovered as the mean of `−g_i` over the
/// support `c_i > 1e-6` (with `g = 2Xᵀ(Xc − y) + 2λc`); the bound
/// multipliers are `ν_i = g_i + μ` off the support. The residual is the
/// largest of the support stationarity gap, the dual infeasibility
/// `max(0, −ν_i)`, and the complementarity product `ν_i·c_i`.
pub fn kkt_certificate_ancr(x: &Matrix, y: &[f64], lambda: f64, c: &[f64]) -> Result<f64> {
    let n = x.cols();
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: c.len() });
    }
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch { expected: x.rows(), actual: y.len() });
    }
    let sum: f64 = c.iter().sum();
    let min = c.iter().copied().fold(f64::INFINITY, f64::min);
    if (sum - 1.0).abs() > 1e-8 || min < -1e-8 {
        return Err(Error::InfeasibleInput(format!("sum = {sum}, min = {min}")));
    }

    let mut r = vec![0.0; x.rows()];
    for (col, &cj) in x.columns().zip(c) {
        for (ri, xi) in r.iter_mut().zip(col) {
            *ri += xi * cj;
        }
    }
    r.iter_mut().zip(y).for_each(|(ri, yi)| *ri -= yi);
    let g: Vec<f64> = x
        .columns()
        .zip(c)
        .map(|(col, &ci)| 2.0 * col.iter().zip(&r).map(|(a, b)| a * b).sum::<f64>() + 2.0 * lambda * ci)
        .collect();

    let support: Vec<usize> = (0..n).filter(|&i| c[i] > SUPPORT_THRESHOLD).collect();
    if support.is_empty() {
        return Err(Error::InfeasibleInput("empty support".into()));
    }
    let mu = -support.iter().map(|&i| g[i]).sum::<f64>() / support.len() as f64;

    let mut residual = 0.0f64;
    for i in 0..n {
        let nu = g[i] + mu;
        if c[i] > SUPPORT_THRESHOLD {
            residual = residual.max(nu.abs());
        } else {
            residual = residual.max((-nu).max(0.0)).max((nu * c[i]).abs());
        }
    }
    Ok(residual)
}

/// Minimizer of `‖y − Xc‖² + λ‖c‖²` subject to `1ᵀc = 1`, from the
/// `(n+1)×(n+1)` bordered KKT system
/// `[2(XᵀX + λI) 1; 1ᵀ 0]·[c; μ] = [2Xᵀy; 1]`.
pub fn bordered_system_acr(x: &Matrix, y: &[f64], lambda: f64) -> Result<Vector> {
    let n = x.cols();
    if y.len() != x.rows() {
        return Err(Error::DimensionMismatch { expected: x.rows(), actual: y.len() });
    }
    let (q, b, _) = quadratic_form(x, y, lambda);
    let m = n + 1;
    let mut data = vec![0.0; m * m];
    for j in 0..n {
        for i in 0..n {
            data[j * m + i] = 2.0 * q[i * n + j];
        }
        data[j * m + n] = 1.0;
        data[n * m + j] = 1.0;
    }
    let mut rhs: Vec<f64> = b.iter().map(|v| 2.0 * v).collect();
    rhs.push(1.0);
    let system = Matrix::from_col_major(m, m, data)?;
    let mut sol = dense_solve(&system, &rhs)?.into_vec();
    sol.truncate(n);
    Vector::new(sol)
}

/// Exact NCR minimizer by enumerating supports: for each subset, solve the
/// ridge normal equations restricted to it and keep the best nonnegative
/// candidate.
pub fn enumerate_supports_ncr(x: &Matrix, y: &[f64], lambda: f64) -> Result<(Vector, f64)> {
    let n = x.cols();
    if n > MAX_ATOMS {
        return Err(Error::TooManyAtoms { max: MAX_ATOMS, actual: n });
    }
    let (q, b, yy) = quadratic_form(x, y, lambda);
    let mut best = (yy, vec![0.0; n]);
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let mut sub = vec![0.0; k * k];
        for (cj, &j) in idx.iter().enumerate() {
            for (ci, &i) in idx.iter().enumerate() {
                sub[cj * k + ci] = q[i * n + j];
            }
        }
        let rhs: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
        let Ok(sol) = dense_solve(&Matrix::from_col_major(k, k, sub)?, &rhs) else {
            continue;
        };
        if sol.iter().any(|&v| v < 0.0) {
            continue;
        }
        let mut c = vec![0.0; n];
        for (&i, &v) in idx.iter().zip(sol.iter()) {
            c[i] = v;
        }
        let f = eval_quadratic(&q, &b, yy, &c);
        if f < best.0 {
            best = (f, c);
        }
    }
    Ok((Vector::new(best.1)?, best.0))
}

/// `XᵀX + λI` (row-major), `Xᵀy` and `yᵀy`.
fn quadratic_form(x: &Matrix, y: &[f64], lambda: f64) -> (Vec<f64>, Vec<f64>, f64) {
    let n = x.cols();
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            q[i * n + j] = x.column(i).iter().zip(x.column(j)).map(|(a, b)| a * b).sum();
        }
        q[i * n + i] += lambda;
    }
    let b = x.columns().map(|col| col.iter().zip(y).map(|(a, b)| a * b).sum()).collect();
    let yy = y.iter().map(|v| v * v).sum();
    (q, b, yy)
}

fn eval_quadratic(q: &[f64], b: &[f64], yy: f64, c: &[f64]) -> f64 {
    let n = c.len();
    let mut f = yy;
    for i in 0..n {
        if c[i] == 0.0 {
            continue;
        }
        f -= 2.0 * b[i] * c[i];
        f += c[i] * (0..n).map(|j| q[i * n + j] * c[j]).sum::<f64>();
    }
    f
}

fn visit_compositions(counts: &mut [usize], pos: usize, remaining: usize, f: &mut impl FnMut(&[usize])) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        f(counts);
        return;
    }
    for k in 0..=remaining {
        counts[pos] = k;
        visit_compositions(counts, pos + 1, remaining - k, f);
    }
}
