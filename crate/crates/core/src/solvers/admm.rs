use super::{residual_objective, PreparedDictionary, SolveResult, SolverConfig, Stopping};
use crate::numerics::{dist_inf, Vector};
use crate::projections::{project_nonnegative, project_simplex};
use crate::Result;

/// Constraint handled by the ADMM `z`-update.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZStep {
    /// `z ≥ 0, 1ᵀz = 1` (ANCR).
    Simplex,
    /// `z ≥ 0` (NCR).
    Nonnegative,
    /// No constraint; the iteration then converges to the CRC solution.
    Identity,
}

impl ZStep {
    fn apply(self, v: &[f64]) -> Vector {
        match self {
            ZStep::Simplex => project_simplex(v),
            ZStep::Nonnegative => project_nonnegative(v),
            ZStep::Identity => Vector::new(v.to_vec()).expect("finite iterate"),
        }
    }
}

/// ANCR coding: `min ‖y − Xc‖² + λ‖c‖²` s.t. `c ≥ 0, 1ᵀc = 1`.
pub fn solve_ancr(dict: &PreparedDictionary, y: &[f64], cfg: &SolverConfig) -> Result<SolveResult> {
    solve_admm(dict, y, cfg, ZStep::Simplex)
}

/// NCR coding: `min ‖y − Xc‖² + λ‖c‖²` s.t. `c ≥ 0`.
pub fn solve_ncr(dict: &PreparedDictionary, y: &[f64], cfg: &SolverConfig) -> Result<SolveResult> {
    solve_admm(dict, y, cfg, ZStep::Nonnegative)
}

/// ADMM on the split `z = c` with multiplier `δ`, starting from
/// `z₀ = c₀ = δ₀ = 0`:
///
/// ```text
/// c ← [XᵀX + ((ρ+2λ)/2)I]⁻¹ [Xᵀy + (ρz + δ)/2]
/// z ← P(c − δ/ρ)
/// δ ← δ + ρ(z − c)
/// ```
///
/// Stops once the rule in `cfg.stopping` holds or after `max_iters`
/// iterations. Running out of iterations is reported through
/// `converged = false`, not as an error.
pub fn solve_admm(dict: &PreparedDictionary, y: &[f64], cfg: &SolverConfig, zstep: ZStep) -> Result<SolveResult> {
    solve_admm_observed(dict, y, cfg, zstep, &mut |_, _| {})
}

/// As [`solve_admm`], calling `observe(c_t, z_t)` after every iteration.
pub fn solve_admm_observed(
    dict: &PreparedDictionary,
    y: &[f64],
    cfg: &SolverConfig,
    zstep: ZStep,
    observe: &mut dyn FnMut(&[f64], &[f64]),
) -> Result<SolveResult> {
    cfg.validate()?;
    dict.check_query(y)?;
    let x = dict.x();
    let (n, d) = (dict.atoms(), dict.dim());
    let rho = cfg.rho;
    let system = dict.system_for(cfg.admm_shift())?;

    // The Xᵀy part of the right-hand side never changes.
    let base = system.ridge(x, y);
    let mut base_image = vec![0.0; d];
    super::system::mul_into(x, &base, &mut base_image);

    let mut c = vec![0.0; n];
    let mut z = Vector::zeros(n);
    let mut delta = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut step = vec![0.0; n];
    let mut step_image = vec![0.0; d];
    let mut xc = vec![0.0; d];
    let mut shifted = vec![0.0; n];

    let mut primal_hist = Vec::new();
    let mut dual_hist = Vec::new();
    let mut objective_hist = Vec::new();
    let mut converged = false;

    for _ in 0..cfg.max_iters {
        for ((r, zi), di) in rhs.iter_mut().zip(z.iter()).zip(&delta) {
            *r = 0.5 * (rho * zi + di);
        }
        system.solve_with_image(x, &rhs, &mut step, &mut step_image);
        for ((ci, b), s) in c.iter_mut().zip(&base).zip(&step) {
            *ci = b + s;
        }
        for ((v, b), s) in xc.iter_mut().zip(&base_image).zip(&step_image) {
            *v = b + s;
        }

        for ((s, ci), di) in shifted.iter_mut().zip(&c).zip(&delta) {
            *s = ci - di / rho;
        }
        let z_next = zstep.apply(&shifted);
        for ((di, zi), ci) in delta.iter_mut().zip(z_next.iter()).zip(&c) {
            *di += rho * (zi - ci);
        }

        let primal = dist_inf(&z_next, &c);
        let dual = rho * dist_inf(&z_next, &z);
        primal_hist.push(primal);
        dual_hist.push(dual);
        objective_hist.push(residual_objective(y, &xc, cfg.lambda, &c));
        z = z_next;
        observe(&c, &z);

        let done = match cfg.stopping {
            Stopping::Primal => primal <= cfg.tol,
            Stopping::PrimalDual => primal <= cfg.tol && dual <= cfg.tol,
        };
        if done {
            converged = true;
            break;
        }
    }

    Ok(SolveResult {
        c: Vector::new(c)?,
        z,
        iterations: primal_hist.len(),
        primal_residual_history: primal_hist,
        dual_residual_history: dual_hist,
        objective_history: objective_hist,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{normalize_columns, Matrix};
    use crate::oracle::{enumerate_supports_ncr, grid_qp_simplex, kkt_certificate_ancr};
    use crate::solvers::tests::random_dictionary;
    use crate::solvers::{objective, prepare_dictionary, solve_crc};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tight(lambda: f64) -> SolverConfig {
        SolverConfig::new(lambda, 1.0, 1e-8, 20_000).unwrap()
    }

    fn random_query(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn single_atom_is_forced_to_one() {
        let x = Matrix::from_columns(&[[0.6, 0.8]]).unwrap();
        let cfg = SolverConfig::default();
        let dict = prepare_dictionary(x, &cfg).unwrap();
        let res = solve_ancr(&dict, &[-0.3, 2.0], &cfg).unwrap();
        assert!(res.converged);
        assert!((res.z[0] - 1.0).abs() < 1e-12);
        assert!((res.c[0] - 1.0).abs() <= cfg.tol);
    }

    #[test]
    fn exact_member_gets_largest_weight() {
        let x = normalize_columns(&Matrix::from_columns(&[[1.0, 0.1, 0.0], [0.0, 1.0, 0.2], [0.1, 0.0, 1.0]]).unwrap())
            .unwrap();
        let cfg = SolverConfig::new(1e-6, 1.0, 1e-8, 5000).unwrap();
        let dict = prepare_dictionary(x.clone(), &cfg).unwrap();
        for j in 0..3 {
            let y = x.column(j).to_vec();
            let res = solve_ancr(&dict, &y, &cfg).unwrap();
            let best = (0..3).max_by(|&a, &b| res.z[a].total_cmp(&res.z[b])).unwrap();
            assert_eq!(best, j);
            let (grid, _) = grid_qp_simplex(&x, &y, 1e-6, 1e-3).unwrap();
            let grid_best = (0..3).max_by(|&a, &b| grid[a].total_cmp(&grid[b])).unwrap();
            assert_eq!(grid_best, j);
        }
    }

    #[test]
    fn ancr_matches_grid_oracle_on_small_instance() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let x = random_dictionary(4, 3, &mut rng);
        let y = random_query(4, &mut rng);
        let cfg = tight(1e-3);
        let dict = prepare_dictionary(x.clone(), &cfg).unwrap();
        let res = solve_ancr(&dict, &y, &cfg).unwrap();
        assert!(res.converged);
        let f = objective(&x, &y, 1e-3, &res.z).unwrap();
        let (_, f_grid) = grid_qp_simplex(&x, &y, 1e-3, 1e-3).unwrap();
        assert!(f - f_grid <= 1e-4, "admm {f} vs grid {f_grid}");
        assert!(kkt_certificate_ancr(&x, &y, 1e-3, &res.z).unwrap() <= 1e-4);
    }

    #[test]
    fn ncr_zero_query_stays_at_origin() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let cfg = SolverConfig::default();
        let dict = prepare_dictionary(random_dictionary(5, 3, &mut rng), &cfg).unwrap();
        let res = solve_ncr(&dict, &[0.0; 5], &cfg).unwrap();
        assert!(res.converged);
        assert!(res.c.iter().chain(res.z.iter()).all(|&v| v == 0.0));
    }

    #[test]
    fn ncr_exact_member_and_oracle_gap() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x = random_dictionary(4, 3, &mut rng);
        let cfg = SolverConfig::new(1e-6, 1.0, 1e-9, 20_000).unwrap();
        let dict = prepare_dictionary(x.clone(), &cfg).unwrap();
        let y = x.column(1).to_vec();
        let res = solve_ncr(&dict, &y, &cfg).unwrap();
        // The first iterate is already nonnegative, so the primal rule stops there.
        assert_eq!(res.iterations, 1);
        let res = solve_ncr(&dict, &y, &cfg.with_stopping(Stopping::PrimalDual)).unwrap();
        assert!(res.converged);
        assert!((res.z[1] - 1.0).abs() < 1e-3);
        assert!(objective(&x, &y, 1e-6, &res.z).unwrap() < 1e-5);

        let y = random_query(4, &mut rng);
        let cfg = tight(1e-3);
        let dict = prepare_dictionary(x.clone(), &cfg).unwrap();
        let res = solve_ncr(&dict, &y, &cfg.with_stopping(Stopping::PrimalDual)).unwrap();
        let (_, f_exact) = enumerate_supports_ncr(&x, &y, 1e-3).unwrap();
        let f = objective(&x, &y, 1e-3, &res.z).unwrap();
        assert!(f - f_exact <= 1e-4 && f_exact - f <= 1e-6);
    }

    #[test]
    fn identity_zstep_recovers_crc() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for (d, n) in [(6, 4), (4, 9)] {
            let x = random_dictionary(d, n, &mut rng);
            let y = random_query(d, &mut rng);
            let cfg = tight(1e-2).with_stopping(Stopping::PrimalDual);
            let dict = prepare_dictionary(x, &cfg).unwrap();
            let admm = solve_admm(&dict, &y, &cfg, ZStep::Identity).unwrap();
            let crc = solve_crc(&dict, &y, 1e-2).unwrap();
            assert!(admm.converged);
            assert!(dist_inf(&admm.c, &crc.c) <= 1e-6, "d={d} n={n}");
        }
    }

    #[test]
    fn feasibility_and_bookkeeping() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cfg = SolverConfig::default();
        for (d, n) in [(10, 6), (8, 30)] {
            let dict = prepare_dictionary(random_dictionary(d, n, &mut rng), &cfg).unwrap();
            for _ in 0..5 {
                let y = random_query(d, &mut rng);
                let a = solve_ancr(&dict, &y, &cfg).unwrap();
                assert!(a.z.iter().all(|&v| v >= -1e-15));
                assert!((a.z.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                assert!(a.iterations <= cfg.max_iters);
                assert_eq!(a.iterations, a.objective_history.len());
                assert_eq!(a.iterations, a.dual_residual_history.len());
                assert_eq!(a.converged, a.final_primal_residual() <= cfg.tol);
                let b = solve_ncr(&dict, &y, &cfg).unwrap();
                assert!(b.z.iter().all(|&v| v >= 0.0));
                assert_eq!(b.converged, b.final_primal_residual() <= cfg.tol);
            }
        }
    }

    #[test]
    fn iteration_cap_is_reported_not_raised() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let cfg = SolverConfig::new(1e-3, 1.0, 1e-14, 2).unwrap();
        let dict = prepare_dictionary(random_dictionary(6, 5, &mut rng), &cfg).unwrap();
        let res = solve_ancr(&dict, &random_query(6, &mut rng), &cfg).unwrap();
        assert_eq!(res.iterations, 2);
        assert!(!res.converged);
    }

    #[test]
    fn observer_sees_every_iterate() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let cfg = SolverConfig::default();
        let dict = prepare_dictionary(random_dictionary(6, 5, &mut rng), &cfg).unwrap();
        let y = random_query(6, &mut rng);
        let mut seen = Vec::new();
        let res = solve_admm_observed(&dict, &y, &cfg, ZStep::Simplex, &mut |c, z| seen.push((c.to_vec(), z.to_vec())))
            .unwrap();
        assert_eq!(seen.len(), res.iterations);
        let (c, z) = seen.last().unwrap();
        assert_eq!((c.as_slice(), z.as_slice()), (res.c.as_slice(), res.z.as_slice()));
        assert_eq!(res, solve_admm(&dict, &y, &cfg, ZStep::Simplex).unwrap());
    }

    #[test]
    fn query_length_is_checked() {
        let cfg = SolverConfig::default();
        let dict = prepare_dictionary(Matrix::identity(3), &cfg).unwrap();
        assert!(matches!(
            solve_ancr(&dict, &[1.0, 0.0], &cfg),
            Err(crate::Error::DimensionMismatch { expected: 3, actual: 2 })
        ));
    }
}
