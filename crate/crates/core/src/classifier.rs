//! Least-residual classification over class-partitioned coding vectors.

use std::ops::Range;

use crate::numerics::{normalize_vector, norm2};
use crate::solvers::{solve, Method, PreparedDictionary, SolveResult, SolverConfig};
use crate::{Error, Result};

/// Contiguous column ranges of each class in the dictionary, in class order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassIndex {
    ranges: Vec<Range<usize>>,
}

impl ClassIndex {
    /// Class `i` owns the next `counts[i]` columns. Empty classes are rejected.
    pub fn from_counts(counts: &[usize]) -> Result<Self> {
        let total: usize = counts.iter().sum();
        if counts.is_empty() || counts.contains(&0) {
            return Err(Error::InvalidClassIndex { n: total });
        }
        let mut start = 0;
        let ranges = counts
            .iter()
            .map(|&k| {
                let r = start..start + k;
                start += k;
                r
            })
            .collect();
        Ok(Self { ranges })
    }

    /// Builds the index from per-column labels, which must already be grouped
    /// as `0,0,…,1,1,…,K−1` with every class present.
    pub fn from_sorted_labels(labels: &[usize]) -> Result<Self> {
        let n = labels.len();
        let mut counts: Vec<usize> = Vec::new();
        for &label in labels {
            if label == counts.len() {
                counts.push(1);
            } else if label + 1 == counts.len() {
                counts[label] += 1;
            } else {
                return Err(Error::InvalidClassIndex { n });
            }
        }
        Self::from_counts(&counts)
    }

    pub fn class_count(&self) -> usize {
        self.ranges.len()
    }

    /// Total number of columns covered.
    pub fn len(&self) -> usize {
        self.ranges.last().map_or(0, |r| r.end)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self, class: usize) -> Range<usize> {
        self.ranges[class].clone()
    }

    pub fn ranges(&self) -> &[Range<usize>] {
        &self.ranges
    }

    pub fn class_of(&self, column: usize) -> Option<usize> {
        self.ranges.iter().position(|r| r.contains(&column))
    }
}

/// Predicted class and the per-class residuals it was chosen from.
#[derive(Clone, Debug, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub residuals: Vec<f64>,
}

/// `r_i = ‖y − X_i·c_i‖₂` for every class `i`.
pub fn class_residuals(dict: &PreparedDictionary, idx: &ClassIndex, y: &[f64], c: &[f64]) -> Result<Vec<f64>> {
    let (d, n) = (dict.dim(), dict.atoms());
    if y.len() != d {
        return Err(Error::DimensionMismatch { expected: d, actual: y.len() });
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: c.len() });
    }
    if idx.len() != n {
        return Err(Error::InvalidClassIndex { n });
    }
    let x = dict.x();
    let mut r = vec![0.0; d];
    Ok(idx
        .ranges()
        .iter()
        .map(|range| {
            r.copy_from_slice(y);
            let block = x.column_block(range.clone());
            for (col, &cj) in block.chunks_exact(d).zip(&c[range.clone()]) {
                if cj != 0.0 {
                    for (ri, xi) in r.iter_mut().zip(col) {
                        *ri -= xi * cj;
                    }
                }
            }
            norm2(&r)
        })
        .collect())
}

/// Index of the smallest residual; ties go to the lowest class index.
pub fn argmin_class(residuals: &[f64]) -> usize {
    let mut best = 0;
    for (i, &r) in residuals.iter().enumerate().skip(1) {
        if r < residuals[best] {
            best = i;
        }
    }
    best
}

/// Normalizes `y`, codes it with `method`, and picks the least-residual class.
pub fn classify(
    dict: &PreparedDictionary,
    idx: &ClassIndex,
    y: &[f64],
    cfg: &SolverConfig,
    method: Method,
) -> Result<Prediction> {
    classify_with_solution(dict, idx, y, cfg, method).map(|(p, _)| p)
}

/// As [`classify`], also returning the coding result.
pub fn classify_with_solution(
    dict: &PreparedDictionary,
    idx: &ClassIndex,
    y: &[f64],
    cfg: &SolverConfig,
    method: Method,
) -> Result<(Prediction, SolveResult)> {
    if idx.len() != dict.atoms() {
        return Err(Error::InvalidClassIndex { n: dict.atoms() });
    }
    let y = normalize_vector(y)?;
    let solution = solve(dict, &y, cfg, method)?;
    let residuals = class_residuals(dict, idx, &y, &solution.c)?;
    let label = argmin_class(&residuals);
    Ok((Prediction { label, residuals }, solution))
}
