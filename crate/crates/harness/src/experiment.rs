//! Benchmark, λ sweep and convergence runs.

use std::fmt::Write as _;
use std::time::Instant;

use ancr::classifier::classify_with_solution;
use ancr::data::{
    load_csv, load_train_test, preprocess, rescale_unit_range, sample_split, DataSource, Preprocessed,
};
use ancr::numerics::{norm2, normalize_vector};
use ancr::solvers::{
    objective, prepare_dictionary, solve_admm_observed, Method, PreparedDictionary, SolveResult, SolverConfig, ZStep,
};
use rayon::prelude::*;

use crate::config::{DatasetPaths, ExperimentConfig};
use crate::error::{HarnessError, Result};
use crate::report::{summarize, sweep_csv, write_file, DatasetInfo, QueryStat, RunReport, RunRow};

/// Loaded data plus the config that produced it.
pub struct Experiment {
    pub cfg: ExperimentConfig,
    pub source: DataSource,
    pub info: DatasetInfo,
    pool: rayon::ThreadPool,
}

impl Experiment {
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let (source, rescale) = match &cfg.dataset {
            DatasetPaths::Separate { train, test } => {
                let (mut train, mut test) = load_train_test(train, test, cfg.format).map_err(HarnessError::Data)?;
                let r = rescale_unit_range(&mut [&mut train, &mut test], cfg.rescale).map_err(HarnessError::Data)?;
                (DataSource::Separate { train, test }, r)
            }
            DatasetPaths::Single(path) => {
                let mut ds = load_csv(path, cfg.format).map_err(HarnessError::Data)?;
                let r = rescale_unit_range(&mut [&mut ds], cfg.rescale).map_err(HarnessError::Data)?;
                (DataSource::Single(ds), r)
            }
        };
        let pool_ds = source.train_pool();
        let info = DatasetInfo {
            dim: pool_ds.dim(),
            train_pool: pool_ds.len(),
            test_pool: match &source {
                DataSource::Separate { test, .. } => Some(test.len()),
                DataSource::Single(_) => None,
            },
            class_names: pool_ds.class_names().to_vec(),
            rescale: rescale.map(Into::into),
        };
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.worker_threads())
            .build()
            .map_err(|e| HarnessError::Internal(e.to_string()))?;
        Ok(Self { cfg: cfg.clone(), source, info, pool })
    }

    /// Split and preprocess for one training size and repetition.
    pub fn prepare(&self, size: Option<usize>, rep: usize) -> Result<Preprocessed> {
        let split = sample_split(&self.source, &self.cfg.split_spec(size), rep).map_err(HarnessError::Data)?;
        preprocess(&split, self.cfg.pca_dim).map_err(HarnessError::Data)
    }

    pub fn solver(&self, lambda: f64) -> Result<SolverConfig> {
        self.cfg.solver(lambda).map_err(HarnessError::solver)
    }

    /// Classifies every test column; results come back in column order.
    pub fn classify_all(
        &self,
        pre: &Preprocessed,
        dict: &PreparedDictionary,
        solver: &SolverConfig,
        method: Method,
    ) -> Result<Vec<QueryStat>> {
        let queries: Vec<(usize, &[f64])> = pre.test_labels.iter().copied().zip(pre.test.columns()).collect();
        self.pool.install(|| {
            queries
                .par_iter()
                .map(|&(truth, y)| {
                    let (pred, sol) = classify_with_solution(dict, &pre.class_index, y, solver, method)
                        .map_err(HarnessError::solver)?;
                    Ok(QueryStat {
                        truth,
                        predicted: pred.label,
                        iterations: sol.iterations,
                        final_primal_residual: sol.final_primal_residual(),
                        converged: sol.converged,
                    })
                })
                .collect()
        })
    }

    pub fn run(&self) -> Result<RunReport> {
        let cfg = &self.cfg;
        let mut rows = Vec::new();
        for size in cfg.train_sizes() {
            for rep in 0..cfg.repetitions {
                let pre = self.prepare(size, rep)?;
                for &lambda in &cfg.lambdas {
                    let solver = self.solver(lambda)?;
                    let start = Instant::now();
                    let dict = prepare_dictionary(pre.train.clone(), &solver).map_err(HarnessError::solver)?;
                    let setup = start.elapsed().as_secs_f64();
                    for &method in &cfg.methods {
                        let start = Instant::now();
                        let queries = self.classify_all(&pre, &dict, &solver, method)?;
                        let seconds = setup + start.elapsed().as_secs_f64();
                        rows.push(row(method, size, lambda, rep, queries, seconds));
                    }
                }
            }
        }
        // Table order: method, then N, then λ, then repetition.
        let method_rank = |m: Method| cfg.methods.iter().position(|&x| x == m).unwrap();
        let lambda_rank = |l: f64| cfg.lambdas.iter().position(|&x| x == l).unwrap();
        let size_rank = |s: Option<usize>| cfg.train_sizes().iter().position(|&x| x == s).unwrap();
        rows.sort_by_key(|r: &RunRow| (method_rank(r.method), size_rank(r.per_class), lambda_rank(r.lambda), r.rep));
        let summary = summarize(&rows);
        Ok(RunReport { dataset: self.info.clone(), seed: cfg.seed, rows, summary })
    }
}

fn row(method: Method, per_class: Option<usize>, lambda: f64, rep: usize, queries: Vec<QueryStat>, seconds: f64) -> RunRow {
    let total = queries.len();
    let correct = queries.iter().filter(|q| q.predicted == q.truth).count();
    RunRow {
        method,
        per_class,
        lambda,
        rep,
        correct,
        total,
        accuracy: 100.0 * correct as f64 / total as f64,
        mean_iters: queries.iter().map(|q| q.iterations as f64).sum::<f64>() / total as f64,
        nonconverged: queries.iter().filter(|q| !q.converged).count(),
        seconds,
        queries,
    }
}

/// Runs every (method, N, λ, repetition) cell and writes the report files
/// into `cfg.out`.
pub fn run_benchmark(cfg: &ExperimentConfig) -> Result<RunReport> {
    let report = Experiment::load(cfg)?.run()?;
    report.write(&cfg.out)?;
    Ok(report)
}

/// As [`run_benchmark`], plus `sweep.csv` with one mean accuracy per λ.
pub fn run_lambda_sweep(cfg: &ExperimentConfig) -> Result<RunReport> {
    let report = run_benchmark(cfg)?;
    write_file(&cfg.out, "sweep.csv", &sweep_csv(&report.summary))?;
    Ok(report)
}

/// Per-iteration trace of one solve, with the all-zero start as `t = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceCurve {
    /// Objective at `c_t`.
    pub objective: Vec<f64>,
    pub primal_residual: Vec<f64>,
    pub dual_residual: Vec<f64>,
    /// Objective at the feasible iterate `z_t`.
    pub feasible_objective: Vec<f64>,
    pub converged: bool,
}

impl ConvergenceCurve {
    /// `feasible` holds the objective at `z_t` for `t ≥ 1`.
    pub fn from_solution(y: &[f64], sol: &SolveResult, feasible: &[f64]) -> Self {
        let prepend = |first: f64, rest: &[f64]| std::iter::once(first).chain(rest.iter().copied()).collect();
        let start = norm2(y).powi(2);
        Self {
            objective: prepend(start, &sol.objective_history),
            primal_residual: prepend(0.0, &sol.primal_residual_history),
            dual_residual: prepend(0.0, &sol.dual_residual_history),
            feasible_objective: prepend(start, feasible),
            converged: sol.converged,
        }
    }

    pub fn iterations(&self) -> usize {
        self.objective.len() - 1
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("t,objective,primal_residual,dual_residual,feasible_objective\n");
        for t in 0..self.objective.len() {
            writeln!(
                s,
                "{t},{:e},{:e},{:e},{:e}",
                self.objective[t], self.primal_residual[t], self.dual_residual[t], self.feasible_objective[t]
            )
            .unwrap();
        }
        s
    }
}

impl Experiment {
    /// Method traced by `converge`: the first ADMM method configured, else ANCR.
    pub fn traced_method(&self) -> Method {
        self.cfg.methods.iter().copied().find(|m| m.is_iterative()).unwrap_or(Method::Ancr)
    }

    pub fn convergence_curve(
        &self,
        pre: &Preprocessed,
        dict: &PreparedDictionary,
        solver: &SolverConfig,
        query: usize,
    ) -> Result<ConvergenceCurve> {
        if query >= pre.test.cols() {
            return Err(HarnessError::IndexOutOfRange { index: query, len: pre.test.cols() });
        }
        let y = normalize_vector(pre.test.column(query)).map_err(HarnessError::Data)?;
        let zstep = match self.traced_method() {
            Method::Ncr => ZStep::Nonnegative,
            _ => ZStep::Simplex,
        };
        let mut feasible = Vec::new();
        let mut observe = |_: &[f64], z: &[f64]| feasible.push(objective(dict.x(), &y, solver.lambda, z).unwrap_or(f64::NAN));
        let sol = solve_admm_observed(dict, &y, solver, zstep, &mut observe).map_err(HarnessError::solver)?;
        Ok(ConvergenceCurve::from_solution(&y, &sol, &feasible))
    }
}

/// Convergence CSV for one test query, using the first configured
/// training size and λ at repetition 0.
pub fn emit_convergence(cfg: &ExperimentConfig, query_index: usize) -> Result<String> {
    let exp = Experiment::load(cfg)?;
    let pre = exp.prepare(cfg.train_sizes()[0], 0)?;
    let solver = exp.solver(cfg.lambdas[0])?;
    let dict = prepare_dictionary(pre.train.clone(), &solver).map_err(HarnessError::solver)?;
    Ok(exp.convergence_curve(&pre, &dict, &solver, query_index)?.to_csv())
}
