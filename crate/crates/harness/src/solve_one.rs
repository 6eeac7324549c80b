//! Codes a single query against a dictionary file and reports the details.

use std::fmt::Write as _;
use std::path::Path;

use ancr::classifier::{classify_with_solution, ClassIndex};
use ancr::data::{load_train_test, rescale_unit_range, FileFormat, Rescale};
use ancr::numerics::normalize_columns;
use ancr::solvers::{prepare_dictionary, Method, SolverConfig};

use crate::error::{HarnessError, Result};

/// Coefficients at or below this magnitude count as zero.
pub const NONZERO_THRESHOLD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassSummary {
    /// Original label from the file.
    pub label: i64,
    pub residual: f64,
    pub nonzero: usize,
    /// Sum of the class's coefficients.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOneReport {
    pub method: Method,
    pub lambda: f64,
    pub iterations: usize,
    pub converged: bool,
    pub predicted: i64,
    pub truth: i64,
    pub classes: Vec<ClassSummary>,
    /// `(dictionary row, label, coefficient)` in class-contiguous order.
    pub coefficients: Vec<(usize, i64, f64)>,
}

/// Columns of the dictionary file are regrouped by class before coding;
/// `row` picks the query among the data lines of `query_file`.
pub fn solve_one(
    dict_file: &Path,
    query_file: &Path,
    row: usize,
    format: FileFormat,
    rescale: Rescale,
    method: Method,
    solver: &SolverConfig,
) -> Result<SolveOneReport> {
    let (mut dict, mut queries) = load_train_test(dict_file, query_file, format).map_err(HarnessError::Data)?;
    rescale_unit_range(&mut [&mut dict, &mut queries], rescale).map_err(HarnessError::Data)?;
    if row >= queries.len() {
        return Err(HarnessError::IndexOutOfRange { index: row, len: queries.len() });
    }
    let mut order: Vec<usize> = (0..dict.len()).collect();
    order.sort_by_key(|&i| dict.labels()[i]);
    let sorted_labels: Vec<usize> = order.iter().map(|&i| dict.labels()[i]).collect();
    let idx = ClassIndex::from_sorted_labels(&sorted_labels).map_err(HarnessError::Data)?;
    let x = dict.features().select_columns(&order).and_then(|m| normalize_columns(&m)).map_err(HarnessError::Data)?;
    let prepared = prepare_dictionary(x, solver).map_err(HarnessError::solver)?;

    let y = queries.features().column(row);
    let (pred, sol) = classify_with_solution(&prepared, &idx, y, solver, method).map_err(|e| match e {
        ancr::Error::ZeroColumn { .. } => HarnessError::Data(e),
        other => HarnessError::solver(other),
    })?;
    let names = dict.class_names();
    let classes = idx
        .ranges()
        .iter()
        .zip(&pred.residuals)
        .enumerate()
        .map(|(k, (range, &residual))| ClassSummary {
            label: names[k],
            residual,
            nonzero: sol.c[range.clone()].iter().filter(|v| v.abs() > NONZERO_THRESHOLD).count(),
            mass: sol.c[range.clone()].iter().sum(),
        })
        .collect();
    Ok(SolveOneReport {
        method,
        lambda: solver.lambda,
        iterations: sol.iterations,
        converged: sol.converged,
        predicted: names[pred.label],
        truth: names[queries.labels()[row]],
        classes,
        coefficients: order.iter().zip(sol.c.iter()).map(|(&i, &c)| (i, names[dict.labels()[i]], c)).collect(),
    })
}

impl SolveOneReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "method {} lambda {} iterations {} converged {}", self.method, self.lambda, self.iterations, self.converged)
            .unwrap();
        writeln!(s, "predicted {} (file label {})", self.predicted, self.truth).unwrap();
        writeln!(s, "\nclass,residual,nonzero,mass").unwrap();
        for c in &self.classes {
            writeln!(s, "{},{:.6},{},{:.6}", c.label, c.residual, c.nonzero, c.mass).unwrap();
        }
        writeln!(s, "\nrow,class,coefficient").unwrap();
        for (row, label, c) in &self.coefficients {
            writeln!(s, "{row},{label},{c:.6}").unwrap();
        }
        s
    }
}
