//! Report rows and their CSV/JSON renderings.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ancr::data::RescaleApplied;
use ancr::solvers::Method;
use serde::Serialize;

use crate::error::{HarnessError, Result as HResult};

/// One (method, N, λ, repetition) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRow {
    #[serde(serialize_with = "method_name")]
    pub method: Method,
    /// Per-class training count; `None` for the provided split.
    pub per_class: Option<usize>,
    pub lambda: f64,
    pub rep: usize,
    pub correct: usize,
    pub total: usize,
    /// Percentage in `[0, 100]`.
    pub accuracy: f64,
    pub mean_iters: f64,
    pub nonconverged: usize,
    pub seconds: f64,
    pub queries: Vec<QueryStat>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QueryStat {
    pub truth: usize,
    pub predicted: usize,
    pub iterations: usize,
    pub final_primal_residual: f64,
    pub converged: bool,
}

/// Mean and sample standard deviation over repetitions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    #[serde(serialize_with = "method_name")]
    pub method: Method,
    pub per_class: Option<usize>,
    pub lambda: f64,
    pub reps: usize,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DatasetInfo {
    pub dim: usize,
    pub train_pool: usize,
    pub test_pool: Option<usize>,
    pub class_names: Vec<i64>,
    pub rescale: Option<RescaleSummary>,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RescaleSummary {
    pub scale: f64,
    pub offset: f64,
    pub source_min: f64,
    pub source_max: f64,
}

impl From<RescaleApplied> for RescaleSummary {
    fn from(r: RescaleApplied) -> Self {
        Self { scale: r.scale, offset: r.offset, source_min: r.source_min, source_max: r.source_max }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub dataset: DatasetInfo,
    pub seed: u64,
    pub rows: Vec<RunRow>,
    pub summary: Vec<SummaryRow>,
}

fn method_name<S: serde::Serializer>(m: &Method, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(m.name())
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    assert!(n > 0);
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Groups rows by (method, N, λ) in first-seen order.
pub fn summarize(rows: &[RunRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Method, Option<usize>, f64)> = Vec::new();
    for r in rows {
        let k = (r.method, r.per_class, r.lambda);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(method, per_class, lambda)| {
            let acc: Vec<f64> = rows
                .iter()
                .filter(|r| r.method == method && r.per_class == per_class && r.lambda == lambda)
                .map(|r| r.accuracy)
                .collect();
            let (mean_accuracy, std_accuracy) = mean_std(&acc);
            SummaryRow { method, per_class, lambda, reps: acc.len(), mean_accuracy, std_accuracy }
        })
        .collect()
}

fn size_label(n: Option<usize>) -> String {
    n.map_or_else(|| "all".to_string(), |n| n.to_string())
}

pub fn results_csv(rows: &[RunRow]) -> String {
    let mut s = String::from("method,N,lambda,rep,accuracy,mean_iters,nonconverged_count,seconds\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:.4},{:.3},{},{:.3}",
            r.method,
            size_label(r.per_class),
            r.lambda,
            r.rep,
            r.accuracy,
            r.mean_iters,
            r.nonconverged,
            r.seconds
        )
        .unwrap();
    }
    s
}

/// `results.csv` without timings; byte-identical across runs of one config.
pub fn accuracy_csv(rows: &[RunRow]) -> String {
    let mut s = String::from("method,N,lambda,rep,correct,total,accuracy,mean_iters,nonconverged_count\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{:.4},{:.3},{}",
            r.method,
            size_label(r.per_class),
            r.lambda,
            r.rep,
            r.correct,
            r.total,
            r.accuracy,
            r.mean_iters,
            r.nonconverged
        )
        .unwrap();
    }
    s
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("method,N,lambda,reps,mean_accuracy,std_accuracy\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{:.4},{:.4}",
            r.method,
            size_label(r.per_class),
            r.lambda,
            r.reps,
            r.mean_accuracy,
            r.std_accuracy
        )
        .unwrap();
    }
    s
}

pub fn queries_csv(rows: &[RunRow]) -> String {
    let mut s = String::from("method,N,lambda,rep,query,truth,predicted,iterations,final_primal_residual,converged\n");
    for r in rows {
        for (i, q) in r.queries.iter().enumerate() {
            writeln!(
                s,
                "{},{},{},{},{},{},{},{},{:e},{}",
                r.method,
                size_label(r.per_class),
                r.lambda,
                r.rep,
                i,
                q.truth,
                q.predicted,
                q.iterations,
                q.final_primal_residual,
                q.converged
            )
            .unwrap();
        }
    }
    s
}

/// One accuracy per (method, N, λ), for plotting against λ.
pub fn sweep_csv(rows: &[SummaryRow]) -> String {
    let mut s = String::from("method,N,lambda,mean_accuracy,std_accuracy\n");
    for r in rows {
        writeln!(s, "{},{},{},{:.4},{:.4}", r.method, size_label(r.per_class), r.lambda, r.mean_accuracy, r.std_accuracy)
            .unwrap();
    }
    s
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> HResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Output { path: dir.to_path_buf(), source })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| HarnessError::Output { path: path.clone(), source })?;
    Ok(path)
}

impl RunReport {
    /// Writes `results.csv`, `accuracy.csv`, `summary.csv`, `queries.csv` and
    /// `report.json` into `dir`.
    pub fn write(&self, dir: &Path) -> HResult<()> {
        write_file(dir, "results.csv", &results_csv(&self.rows))?;
        write_file(dir, "accuracy.csv", &accuracy_csv(&self.rows))?;
        write_file(dir, "summary.csv", &summary_csv(&self.summary))?;
        write_file(dir, "queries.csv", &queries_csv(&self.rows))?;
        let json = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Internal(e.to_string()))?;
        write_file(dir, "report.json", &json)?;
        Ok(())
    }
}
