//! Euclidean projections used by the ADMM `z`-updates.

use crate::numerics::Vector;

/// Nearest point of the probability simplex `{z : z ≥ 0, 1ᵀz = 1}`.
///
/// Sorts a copy of `v` in descending order and finds the largest `k` with
/// `u_k + (1 − Σ_{i≤k} u_i)/k > 0`; the output is `max(v − τ, 0)` with
/// `τ = (Σ_{i≤k} u_i − 1)/k`. Runs in `O(n log n)`.
///
/// # Panics
/// If `v` is empty.
pub fn project_simplex(v: &[f64]) -> Vector {
    let tau = simplex_threshold(v);
    let mut out: Vec<f64> = v.iter().map(|&x| (x - tau).max(0.0)).collect();
    // Rounding can leave the sum a few ulps away from one; rescaling the
    // support restores it without moving any coordinate out of the orthant.
    let sum: f64 = out.iter().sum();
    if sum > 0.0 && (sum - 1.0).abs() > 1e-15 {
        out.iter_mut().for_each(|x| *x /= sum);
    }
    Vector::from_unchecked(out)
}

/// Threshold `τ` such that `Σ max(v_i − τ, 0) = 1`.
///
/// # Panics
/// If `v` is empty.
pub fn simplex_threshold(v: &[f64]) -> f64 {
    assert!(!v.is_empty(), "cannot project an empty vector onto the simplex");
    let mut u = v.to_vec();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut tau = u[0] - 1.0;
    for (k, &uk) in u.iter().enumerate() {
        cumsum += uk;
        let candidate = (cumsum - 1.0) / (k + 1) as f64;
        if uk - candidate > 0.0 {
            tau = candidate;
        } else {
            break;
        }
    }
    tau
}

/// Nearest point of the nonnegative orthant: `max(v, 0)` elementwise.
pub fn project_nonnegative(v: &[f64]) -> Vector {
    Vector::from_unchecked(v.iter().map(|&x| x.max(0.0)).collect())
}
