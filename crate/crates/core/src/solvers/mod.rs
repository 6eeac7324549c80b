//! Coding models: ANCR and NCR by ADMM, CRC and ACR in closed form.
//!
//! All four minimize `‖y − Xc‖² + λ‖c‖²` over a dictionary `X` of unit
//! columns and differ only in their constraints:
//!
//! | model | `c ≥ 0` | `1ᵀc = 1` |
//! |-------|---------|-----------|
//! | CRC   |         |           |
//! | ACR   |         | ✓         |
//! | NCR   | ✓       |           |
//! | ANCR  | ✓       | ✓         |

mod admm;
mod closed_form;
mod system;

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

pub use admm::{solve_admm, solve_admm_observed, solve_ancr, solve_ncr, ZStep};
pub use closed_form::{solve_acr, solve_crc};

use crate::numerics::{norm2, Matrix, Vector};
use crate::{Error, Result};
use system::{uses_feature_space, ShiftedGram};

/// Dictionary columns must have unit norm within this tolerance.
pub const UNIT_NORM_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    /// Weight of the `‖c‖²` regularizer.
    pub lambda: f64,
    /// ADMM penalty.
    pub rho: f64,
    /// Convergence threshold on `‖z − c‖∞`.
    pub tol: f64,
    pub max_iters: usize,
    pub stopping: Stopping,
}

/// ADMM stopping rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Stopping {
    /// `‖z_t − c_t‖∞ ≤ tol`.
    #[default]
    Primal,
    /// Additionally `ρ‖z_t − z_{t−1}‖∞ ≤ tol`. Needed whenever the first
    /// unconstrained iterate can already be feasible (NCR, identity z-step),
    /// where the primal rule alone stops at `t = 1`.
    PrimalDual,
}

impl FromStr for Stopping {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "primal" => Ok(Stopping::Primal),
            "primal-dual" | "primal_dual" => Ok(Stopping::PrimalDual),
            other => Err(Error::InvalidConfig(format!("unknown stopping rule '{other}' (expected primal or primal-dual)"))),
        }
    }
}

impl fmt::Display for Stopping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stopping::Primal => "primal",
            Stopping::PrimalDual => "primal-dual",
        })
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { lambda: 1e-3, rho: 1.0, tol: 1e-6, max_iters: 200, stopping: Stopping::Primal }
    }
}

impl SolverConfig {
    pub fn new(lambda: f64, rho: f64, tol: f64, max_iters: usize) -> Result<Self> {
        let cfg = Self { lambda, rho, tol, max_iters, stopping: Stopping::Primal };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        Self { lambda, ..self }
    }

    pub fn with_stopping(self, stopping: Stopping) -> Self {
        Self { stopping, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("lambda", self.lambda)?;
        positive("rho", self.rho)?;
        positive("tol", self.tol)?;
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }

    /// Shift of the c-update system `XᵀX + ((ρ + 2λ)/2)·I`.
    pub fn admm_shift(&self) -> f64 {
        (self.rho + 2.0 * self.lambda) / 2.0
    }
}

/// Which coding model to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Ancr,
    Ncr,
    Crc,
    Acr,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Ancr, Method::Ncr, Method::Crc, Method::Acr];

    pub fn name(self) -> &'static str {
        match self {
            Method::Ancr => "ancr",
            Method::Ncr => "ncr",
            Method::Crc => "crc",
            Method::Acr => "acr",
        }
    }

    pub fn is_iterative(self) -> bool {
        matches!(self, Method::Ancr | Method::Ncr)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ancr" => Ok(Method::Ancr),
            "ncr" => Ok(Method::Ncr),
            "crc" => Ok(Method::Crc),
            "acr" => Ok(Method::Acr),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (expected ancr, ncr, crc or acr)"
            ))),
        }
    }
}

/// Output of a coding model.
#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    pub c: Vector,
    /// Split variable of the ADMM models; equal to `c` for closed forms.
    pub z: Vector,
    pub iterations: usize,
    /// `‖z_t − c_t‖∞` for `t = 1..=iterations`.
    pub primal_residual_history: Vec<f64>,
    /// `ρ‖z_t − z_{t−1}‖∞` for `t = 1..=iterations`.
    pub dual_residual_history: Vec<f64>,
    /// `‖y − Xc_t‖² + λ‖c_t‖²` for `t = 1..=iterations`.
    pub objective_history: Vec<f64>,
    pub converged: bool,
}

impl SolveResult {
    pub fn final_primal_residual(&self) -> f64 {
        self.primal_residual_history.last().copied().unwrap_or(0.0)
    }
}

/// A normalized dictionary with the query-independent parts of every solve
/// precomputed for one `(λ, ρ)`.
///
/// Immutable after construction; share it by reference across threads.
#[derive(Clone, Debug)]
pub struct PreparedDictionary {
    x: Matrix,
    cfg: SolverConfig,
    /// `XᵀX` if `n ≤ d`, else `XXᵀ`.
    cross: Matrix,
    /// `X·1`
    row_sums: Vector,
    admm: ShiftedGram,
    ridge: ShiftedGram,
}

/// Validates unit columns and factorizes the c-update and ridge systems.
pub fn prepare_dictionary(x: Matrix, cfg: &SolverConfig) -> Result<PreparedDictionary> {
    cfg.validate()?;
    for (index, col) in x.columns().enumerate() {
        let norm = norm2(col);
        if (norm - 1.0).abs() > UNIT_NORM_TOL {
            return Err(Error::NotNormalized { index, norm });
        }
    }
    let cross = if uses_feature_space(&x) { x.outer_gram() } else { x.gram() };
    let admm = ShiftedGram::new(&x, &cross, cfg.admm_shift())?;
    let ridge = ShiftedGram::new(&x, &cross, cfg.lambda)?;
    let row_sums = x.row_sums();
    Ok(PreparedDictionary { x, cfg: *cfg, cross, row_sums, admm, ridge })
}

impl PreparedDictionary {
    pub fn new(x: Matrix, cfg: &SolverConfig) -> Result<Self> {
        prepare_dictionary(x, cfg)
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.x.rows()
    }

    /// Number of atoms `n`.
    pub fn atoms(&self) -> usize {
        self.x.cols()
    }

    /// `XᵀX`; cached when `n ≤ d`, computed on demand otherwise.
    pub fn gram(&self) -> Cow<'_, Matrix> {
        if uses_feature_space(&self.x) {
            Cow::Owned(self.x.gram())
        } else {
            Cow::Borrowed(&self.cross)
        }
    }

    /// Whether solves go through the d×d feature-space system.
    pub fn uses_feature_space(&self) -> bool {
        uses_feature_space(&self.x)
    }

    /// Explicit c-update system `XᵀX + ((ρ+2λ)/2)·I` (n×n).
    pub fn system_matrix(&self) -> Matrix {
        self.gram().add_identity(self.cfg.admm_shift()).expect("gram is square")
    }

    /// Solves `[XᵀX + ((ρ+2λ)/2)·I]·c = rhs` with the cached factorization.
    pub fn solve_system(&self, rhs: &[f64]) -> Result<Vector> {
        self.check_atoms(rhs.len())?;
        let mut out = vec![0.0; self.atoms()];
        let mut image = vec![0.0; self.dim()];
        self.admm.solve_with_image(&self.x, rhs, &mut out, &mut image);
        Vector::new(out)
    }

    /// Reuses a cached system when the shift matches, otherwise factorizes.
    fn system_for(&self, shift: f64) -> Result<Cow<'_, ShiftedGram>> {
        if shift == self.admm.shift() {
            Ok(Cow::Borrowed(&self.admm))
        } else if shift == self.ridge.shift() {
            Ok(Cow::Borrowed(&self.ridge))
        } else {
            Ok(Cow::Owned(ShiftedGram::new(&self.x, &self.cross, shift)?))
        }
    }

    fn check_query(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), actual: y.len() });
        }
        if let Some(index) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(())
    }

    fn check_atoms(&self, len: usize) -> Result<()> {
        if len != self.atoms() {
            return Err(Error::DimensionMismatch { expected: self.atoms(), actual: len });
        }
        Ok(())
    }
}

/// Runs `method` on query `y`; CRC and ACR use `cfg.lambda`.
pub fn solve(dict: &PreparedDictionary, y: &[f64], cfg: &SolverConfig, method: Method) -> Result<SolveResult> {
    match method {
        Method::Ancr => solve_ancr(dict, y, cfg),
        Method::Ncr => solve_ncr(dict, y, cfg),
        Method::Crc => solve_crc(dict, y, cfg.lambda),
        Method::Acr => solve_acr(dict, y, cfg.lambda),
    }
}

/// `‖y − Xc‖² + λ‖c‖²`
pub fn objective(x: &Matrix, y: &[f64], lambda: f64, c: &[f64]) -> Result<f64> {
    let xc = x.mul_vec(c)?;
    Ok(residual_objective(y, &xc, lambda, c))
}

fn residual_objective(y: &[f64], xc: &[f64], lambda: f64, c: &[f64]) -> f64 {
    let fit: f64 = y.iter().zip(xc).map(|(a, b)| (a - b) * (a - b)).sum();
    fit + lambda * c.iter().map(|v| v * v).sum::<f64>()
}
