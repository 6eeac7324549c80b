//! Affine non-negative collaborative representation (ANCR) coding.
//!
//! A query `y` is coded over a dictionary `X` of unit-norm training columns by
//! minimizing `‖y − Xc‖² + λ‖c‖²` with `c ≥ 0` and `1ᵀc = 1`, solved by ADMM.
//! The query is then assigned to the class whose columns reconstruct it with
//! the smallest residual. The ablation baselines CRC (no constraints), ACR
//! (affine only) and NCR (nonnegative only) share the same surface.
//!
//! Module map:
//!
//! - [`numerics`]: dense column-major matrices, SPD factorization, PCA.
//! - [`projections`]: Euclidean projections onto the simplex and the orthant.
//! - [`solvers`]: the four coding models over a [`solvers::PreparedDictionary`].
//! - [`classifier`]: class residuals and the least-residual rule.
//! - [`data`]: file ingestion, seeded per-class splits, preprocessing.
//! - [`oracle`]: brute-force references used to certify solver outputs.

pub mod classifier;
pub mod data;
mod error;
pub mod numerics;
pub mod oracle;
pub mod projections;
pub mod solvers;

pub use error::{Error, Result};
