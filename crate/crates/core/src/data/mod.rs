//! Datasets, seeded per-class splits, and the preprocessing pipeline.

mod load;
mod preprocess;
mod split;

pub use load::{load_csv, load_train_test, rescale_unit_range, FileFormat, Rescale, RescaleApplied};
pub use preprocess::{preprocess, Preprocessed};
pub use split::{class_stream, sample_split, uniform_below, DataSource, DatasetSplit, PerClassTrain, SplitSpec};

use crate::numerics::Matrix;
use crate::{Error, Result};

/// Samples stored one per column, with dense labels in `[0, K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledDataset {
    features: Matrix,
    labels: Vec<usize>,
    /// Original file label of each dense class id, ascending.
    class_names: Vec<i64>,
}

impl LabeledDataset {
    /// Every class id in `[0, class_names.len())` must occur in `labels`.
    pub fn new(features: Matrix, labels: Vec<usize>, class_names: Vec<i64>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::LengthMismatch { expected: features.cols(), actual: labels.len() });
        }
        let k = class_names.len();
        let mut seen = vec![false; k];
        for &l in &labels {
            if l >= k {
                return Err(Error::InvalidConfig(format!("label {l} out of range for {k} classes")));
            }
            seen[l] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::EmptyClass(class_names[missing].to_string()));
        }
        Ok(Self { features, labels, class_names })
    }

    /// Test pools share the training label map and may miss classes.
    pub(crate) fn with_label_map(features: Matrix, labels: Vec<usize>, class_names: Vec<i64>) -> Result<Self> {
        if labels.len() != features.cols() {
            return Err(Error::LengthMismatch { expected: features.cols(), actual: labels.len() });
        }
        debug_assert!(labels.iter().all(|&l| l < class_names.len()));
        Ok(Self { features, labels, class_names })
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[i64] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn dim(&self) -> usize {
        self.features.rows()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Pool positions of each class, in file order.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.class_count()];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    pub(crate) fn map_features(&mut self, f: impl Fn(f64) -> f64) -> Result<()> {
        let (r, c) = (self.features.rows(), self.features.cols());
        let data = std::mem::replace(&mut self.features, Matrix::zeros(1, 1)).into_vec();
        self.features = Matrix::from_col_major(r, c, data.into_iter().map(f).collect())?;
        Ok(())
    }
}
