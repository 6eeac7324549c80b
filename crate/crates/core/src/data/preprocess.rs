use super::DatasetSplit;
use crate::classifier::ClassIndex;
use crate::numerics::{normalize_columns, pca_fit, Matrix, PcaModel};
use crate::Result;

/// Solver-ready split: unit-norm columns on both sides.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    pub train: Matrix,
    pub train_labels: Vec<usize>,
    pub class_index: ClassIndex,
    pub test: Matrix,
    pub test_labels: Vec<usize>,
    pub pca: Option<PcaModel>,
}

/// Fits PCA on the training columns only, maps both sides with `basisᵀ·v`,
/// then ℓ2-normalizes every column.
///
/// The map is a pure rotation onto the principal subspace: centering would
/// change angles between samples, so full-dimension PCA would no longer
/// leave classifier decisions unchanged.
pub fn preprocess(split: &DatasetSplit, pca_dim: Option<usize>) -> Result<Preprocessed> {
    let (pca, train, test) = match pca_dim {
        None => (None, normalize_columns(&split.train)?, normalize_columns(&split.test)?),
        Some(k) => {
            let model = pca_fit(&split.train, k)?;
            let rotate = |m: &Matrix| model.basis().transpose().mul(m).and_then(|p| normalize_columns(&p));
            let (train, test) = (rotate(&split.train)?, rotate(&split.test)?);
            (Some(model), train, test)
        }
    };
    Ok(Preprocessed {
        train,
        train_labels: split.train_labels.clone(),
        class_index: split.class_index.clone(),
        test,
        test_labels: split.test_labels.clone(),
        pca,
    })
}
