use super::system::mul_into;
use super::{residual_objective, PreparedDictionary, SolveResult};
use crate::numerics::{dot, spd_factorize, Matrix, Vector};
use crate::{Error, Result};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("lambda must be positive and finite, got {lambda}")))
    }
}

fn closed_form_result(dict: &PreparedDictionary, y: &[f64], lambda: f64, c: Vec<f64>) -> Result<SolveResult> {
    let mut xc = vec![0.0; dict.dim()];
    mul_into(dict.x(), &c, &mut xc);
    let objective = residual_objective(y, &xc, lambda, &c);
    let c = Vector::new(c)?;
    Ok(SolveResult {
        z: c.clone(),
        c,
        iterations: 1,
        primal_residual_history: vec![0.0],
        dual_residual_history: vec![0.0],
        objective_history: vec![objective],
        converged: true,
    })
}

/// CRC coding: `c = (XᵀX + λI)⁻¹Xᵀy`.
pub fn solve_crc(dict: &PreparedDictionary, y: &[f64], lambda: f64) -> Result<SolveResult> {
    check_lambda(lambda)?;
    dict.check_query(y)?;
    let system = dict.system_for(lambda)?;
    let c = system.ridge(dict.x(), y);
    closed_form_result(dict, y, lambda, c)
}

/// ACR coding: `min ‖y − Xc‖² + λ‖c‖²` s.t. `1ᵀc = 1`.
///
/// With `D = X − y·1ᵀ`, the objective on the affine set equals
/// `cᵀ(M + λI)c` for `M = DᵀD`, so `c = ĉ/(1ᵀĉ)` with `ĉ = (M + λI)⁻¹1`.
/// For `n > d`, `ĉ = (1 − Dᵀ·(DDᵀ + λI)⁻¹·D·1)/λ`, where
/// `DDᵀ = XXᵀ − y·sᵀ − s·yᵀ + n·yyᵀ` and `s = X·1` come from cached
/// quantities.
pub fn solve_acr(dict: &PreparedDictionary, y: &[f64], lambda: f64) -> Result<SolveResult> {
    check_lambda(lambda)?;
    dict.check_query(y)?;
    let x = dict.x();
    let (d, n) = (dict.dim(), dict.atoms());

    let c_hat: Vec<f64> = if dict.uses_feature_space() {
        let outer = &dict.cross;
        let s = &dict.row_sums;
        let nf = n as f64;
        let mut f = Vec::with_capacity(d * d);
        for j in 0..d {
            for i in 0..d {
                let mut v = outer.get(i, j) - y[i] * s[j] - s[i] * y[j] + nf * y[i] * y[j];
                if i == j {
                    v += lambda;
                }
                f.push(v);
            }
        }
        let factor = spd_factorize(&Matrix::from_col_major(d, d, f)?)?;
        // D·1 = s − n·y
        let mut u: Vec<f64> = s.iter().zip(y).map(|(si, yi)| si - nf * yi).collect();
        factor.solve_in_place(&mut u);
        let yu = dot(y, &u);
        x.columns().map(|col| (1.0 - (dot(col, &u) - yu)) / lambda).collect()
    } else {
        let shifted: Vec<Vec<f64>> =
            x.columns().map(|col| col.iter().zip(y).map(|(a, b)| a - b).collect()).collect();
        let m = Matrix::from_columns(&shifted)?.gram().add_identity(lambda)?;
        let mut ones = vec![1.0; n];
        spd_factorize(&m)?.solve_in_place(&mut ones);
        ones
    };

    let sum: f64 = c_hat.iter().sum();
    if sum.abs() <= 1e-12 || !sum.is_finite() {
        return Err(Error::DegenerateAffineSolution { sum });
    }
    let mut c: Vec<f64> = c_hat.iter().map(|v| v / sum).collect();
    // One correction pass absorbs the rounding left in 1ᵀc.
    let gap = (1.0 - c.iter().sum::<f64>()) / n as f64;
    c.iter_mut().for_each(|v| *v += gap);
    closed_form_result(dict, y, lambda, c)
}
