//! Spot audit of the solvers against the brute-force oracles.

use ancr::numerics::{dist_inf, norm_inf, normalize_columns, Matrix};
use ancr::oracle::{bordered_system_acr, grid_qp_simplex, kkt_certificate_ancr};
use ancr::projections::{project_simplex, simplex_threshold};
use ancr::solvers::{objective, prepare_dictionary, solve_acr, solve_ancr, solve_crc, SolverConfig};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{HarnessError, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AuditLine {
    pub check: &'static str,
    pub instances: usize,
    /// Largest observed violation measure.
    pub worst: f64,
    pub bound: f64,
}

impl AuditLine {
    pub fn passed(&self) -> bool {
        self.worst <= self.bound
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    ancr::data::uniform_below(rng, n)
}

fn instance(rng: &mut ChaCha8Rng, d: usize, n: usize) -> ancr::Result<(Matrix, Vec<f64>)> {
    let cols: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect()).collect();
    let x = normalize_columns(&Matrix::from_columns(&cols)?)?;
    let y = (0..d).map(|_| uniform(rng, -1.0, 1.0)).collect();
    Ok((x, y))
}

/// Runs `instances` random checks of each kind.
pub fn oracle_check(seed: u64, instances: usize) -> Result<Vec<AuditLine>> {
    run(seed, instances).map_err(|e| HarnessError::Internal(e.to_string()))
}

fn run(seed: u64, instances: usize) -> ancr::Result<Vec<AuditLine>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lambdas = [1e-4, 1e-3, 1e-2];
    let (mut grid_gap, mut kkt, mut proj, mut crc, mut acr) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);

    for _ in 0..instances {
        let d = 2 + below(&mut rng, 7);
        let lambda = lambdas[below(&mut rng, 3)];
        let (x, y) = instance(&mut rng, d, 3)?;
        let cfg = SolverConfig::new(lambda, 1.0, 1e-8, 20_000)?;
        let dict = prepare_dictionary(x.clone(), &cfg)?;
        let res = solve_ancr(&dict, &y, &cfg)?;
        let f = objective(&x, &y, lambda, &res.z)?;
        let (_, f_grid) = grid_qp_simplex(&x, &y, lambda, 1e-3)?;
        grid_gap = grid_gap.max(f - f_grid);
        if res.converged {
            kkt = kkt.max(kkt_certificate_ancr(&x, &y, lambda, &res.z)?);
        }

        let c = solve_crc(&dict, &y, lambda)?;
        let lhs = x.gram().add_identity(lambda)?.mul_vec(&c.c)?;
        let rhs = x.tr_mul_vec(&y)?;
        crc = crc.max(dist_inf(&lhs, &rhs) / norm_inf(&rhs).max(f64::MIN_POSITIVE));

        let d4 = 4 + below(&mut rng, 3);
        let (x4, y4) = instance(&mut rng, d4, 4)?;
        let dict4 = prepare_dictionary(x4.clone(), &SolverConfig::default())?;
        let a = solve_acr(&dict4, &y4, 1e-3)?;
        acr = acr.max(dist_inf(&a.c, &bordered_system_acr(&x4, &y4, 1e-3)?));

        let len = 1 + below(&mut rng, 500);
        let v: Vec<f64> = (0..len).map(|_| uniform(&mut rng, -10.0, 10.0)).collect();
        let p = project_simplex(&v);
        let tau = simplex_threshold(&v);
        let worst = v.iter().zip(p.iter()).map(|(vi, pi)| (pi - (vi - tau).max(0.0)).abs()).fold(0.0, f64::max);
        proj = proj.max(worst).max((p.iter().sum::<f64>() - 1.0).abs());
    }

    Ok(vec![
        AuditLine { check: "ancr-vs-grid", instances, worst: grid_gap, bound: 1e-4 },
        AuditLine { check: "ancr-kkt", instances, worst: kkt, bound: 1e-4 },
        AuditLine { check: "simplex-threshold", instances, worst: proj, bound: 1e-10 },
        AuditLine { check: "crc-normal-equations", instances, worst: crc, bound: 1e-8 },
        AuditLine { check: "acr-vs-bordered", instances, worst: acr, bound: 1e-8 },
    ])
}
