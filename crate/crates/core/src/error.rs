//! Error type shared by every module of the crate.

use thiserror::Error;

use crate::discrimination::Povm;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the numerics kernel, the state
/// constructors, the discrimination solvers, and (de)serialization.
#[derive(Debug, Error)]
pub enum Error {
    /// A dimension parameter below the smallest meaningful value.
    #[error("invalid dimension {got}: expected at least {min}")]
    InvalidDim { got: usize, min: usize },

    /// Two operands whose dimensions must agree but do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    /// An index outside `0..dim`.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// A matrix required to be Hermitian is not, beyond tolerance.
    #[error("matrix not Hermitian: asymmetry {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    /// A matrix required to be positive semidefinite has an eigenvalue
    /// below the clamping floor.
    #[error("matrix not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPsd { min_eig: f64 },

    /// A matrix required to be (numerically) nonsingular is not.
    #[error("matrix numerically singular: {detail}")]
    Singular { detail: String },

    /// An iterative kernel (eigensolver, polar polish) hit its cap.
    #[error("no convergence after {iterations} iterations: residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },

    /// The discrimination fixed-point solver hit its cap; the best iterate
    /// is attached so sweeps can still use the certified lower bound.
    #[error(
        "solver did not converge after {iterations} iterations: \
         certificate residual {residual:.3e} (best value {value:.12})"
    )]
    SolverNoConvergence {
        iterations: usize,
        residual: f64,
        value: f64,
        povm: Box<Povm>,
    },

    /// A scalar argument outside its documented range.
    #[error("{name} = {value} outside valid range [{lo}, {hi}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// An ensemble that cannot be discriminated (e.g. zero average state).
    #[error("degenerate ensemble: {detail}")]
    DegenerateEnsemble { detail: String },

    /// A request outside the supported scope of an operation.
    #[error("unsupported input: {detail}")]
    UnsupportedInput { detail: String },

    /// A NaN or infinity where a finite number is required.
    #[error("non-finite entry in {context}")]
    NonFinite { context: &'static str },

    /// Malformed structured-text input (config files, CSV).
    #[error("parse error: {detail}")]
    Parse { detail: String },

    /// Propagated I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
