use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::LabeledDataset;
use crate::classifier::ClassIndex;
use crate::numerics::Matrix;
use crate::{Error, Result};

/// Training-set size per class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PerClassTrain {
    /// Draw exactly this many columns from each class of the training pool.
    Count(usize),
    /// Use the whole training pool as provided.
    Provided,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplitSpec {
    pub per_class_train: PerClassTrain,
    pub seed: u64,
    pub repetitions: usize,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if self.per_class_train == PerClassTrain::Count(0) {
            return Err(Error::InvalidConfig("per_class_train must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::InvalidConfig("repetitions must be at least 1".into()));
        }
        Ok(())
    }
}

/// Where training and test samples come from.
#[derive(Clone, Debug)]
pub enum DataSource {
    /// Training columns are drawn from `train`; `test` is the test pool.
    Separate { train: LabeledDataset, test: LabeledDataset },
    /// Training columns are drawn from one file; the rest form the test pool.
    Single(LabeledDataset),
}

impl DataSource {
    pub fn train_pool(&self) -> &LabeledDataset {
        match self {
            DataSource::Separate { train, .. } => train,
            DataSource::Single(ds) => ds,
        }
    }

    pub fn class_names(&self) -> &[i64] {
        self.train_pool().class_names()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetSplit {
    /// Class-contiguous training columns.
    pub train: Matrix,
    pub train_labels: Vec<usize>,
    pub class_index: ClassIndex,
    /// Position of each training column in the training pool.
    pub train_pool_indices: Vec<usize>,
    pub test: Matrix,
    pub test_labels: Vec<usize>,
}

/// Generator for class `class` in repetition `rep`: ChaCha8 seeded with
/// `seed_from_u64(seed)`, stream `(rep << 32) | class`.
pub fn class_stream(seed: u64, rep: usize, class: usize) -> ChaCha8Rng {
    assert!(rep <= u32::MAX as usize && class <= u32::MAX as usize, "stream index out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((rep as u64) << 32) | class as u64);
    rng
}

/// Uniform integer in `[0, bound)` via the high half of a 64×64 product.
/// Bias is at most `bound / 2⁶⁴`.
pub fn uniform_below(rng: &mut impl RngCore, bound: usize) -> usize {
    assert!(bound > 0);
    ((rng.next_u64() as u128 * bound as u128) >> 64) as usize
}

/// `count` distinct positions of `members`, drawn by a partial
/// Fisher–Yates shuffle and returned in pool order.
fn draw(members: &[usize], count: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut pool = members.to_vec();
    for i in 0..count {
        let j = i + uniform_below(rng, pool.len() - i);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool.sort_unstable();
    pool
}

fn gather(ds: &LabeledDataset, indices: &[usize]) -> Result<(Matrix, Vec<usize>)> {
    let labels = indices.iter().map(|&i| ds.labels()[i]).collect();
    Ok((ds.features().select_columns(indices)?, labels))
}

/// Per-class sampling for repetition `rep`. Selection depends only on
/// `(seed, rep, class id)` and the pool contents.
pub fn sample_split(source: &DataSource, spec: &SplitSpec, rep: usize) -> Result<DatasetSplit> {
    spec.validate()?;
    let pool = source.train_pool();
    let members = pool.class_members();

    let chosen: Vec<Vec<usize>> = match spec.per_class_train {
        PerClassTrain::Provided => members.clone(),
        PerClassTrain::Count(n) => members
            .iter()
            .enumerate()
            .map(|(class, m)| {
                if m.len() < n {
                    return Err(Error::ClassTooSmall { class, available: m.len(), requested: n });
                }
                Ok(draw(m, n, &mut class_stream(spec.seed, rep, class)))
            })
            .collect::<Result<_>>()?,
    };

    let train_pool_indices: Vec<usize> = chosen.concat();
    let (train, train_labels) = gather(pool, &train_pool_indices)?;
    let class_index = ClassIndex::from_counts(&chosen.iter().map(Vec::len).collect::<Vec<_>>())?;

    let (test, test_labels) = match source {
        DataSource::Separate { test, .. } => (test.features().clone(), test.labels().to_vec()),
        DataSource::Single(ds) => {
            let mut taken = vec![false; ds.len()];
            train_pool_indices.iter().for_each(|&i| taken[i] = true);
            let rest: Vec<usize> = (0..ds.len()).filter(|&i| !taken[i]).collect();
            if rest.is_empty() {
                return Err(Error::InvalidConfig("no samples left for the test pool".into()));
            }
            gather(ds, &rest)?
        }
    };
    if test.rows() != train.rows() {
        return Err(Error::DimensionMismatch { expected: train.rows(), actual: test.rows() });
    }

    Ok(DatasetSplit { train, train_labels, class_index, train_pool_indices, test, test_labels })
}
