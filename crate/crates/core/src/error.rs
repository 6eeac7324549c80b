use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("column {index} has (near) zero norm")]
    ZeroColumn { index: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric: |a[{row},{col}] - a[{col},{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("requested {requested} components but at most {max} are available")]
    DimensionTooLarge { requested: usize, max: usize },

    #[error("dictionary column {index} is not unit-norm (norm {norm})")]
    NotNormalized { index: usize, norm: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("affine solution is degenerate: 1ᵀĉ = {sum:e}")]
    DegenerateAffineSolution { sum: f64 },

    #[error("class ranges do not partition {n} columns")]
    InvalidClassIndex { n: usize },

    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },

    #[error("{path}:{line}: expected {expected} features, found {actual}")]
    InconsistentDimension { path: PathBuf, line: usize, expected: usize, actual: usize },

    #[error("dataset has no samples for class {0}")]
    EmptyClass(String),

    #[error("class {class} has {available} samples, {requested} requested")]
    ClassTooSmall { class: usize, available: usize, requested: usize },

    #[error("oracle supports at most {max} atoms, got {actual}")]
    TooManyAtoms { max: usize, actual: usize },

    #[error("input is not on the simplex: {0}")]
    InfeasibleInput(String),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}
