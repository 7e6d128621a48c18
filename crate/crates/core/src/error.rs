use thiserror::Error;

/// Errors raised by kernel construction, quadrature, and the spectral solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("quadrature did not converge: {what} (estimate {estimate:.3e} > tolerance {tolerance:.3e})")]
    NonConvergence {
        what: String,
        estimate: f64,
        tolerance: f64,
    },

    #[error("integrand is not integrable against the kernel weight: {0}")]
    NonIntegrable(String),

    #[error("truncation mismatch: field lattice N={field}, symbol table N={table}")]
    TruncationMismatch { field: usize, table: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("wrong number of field components: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("degenerate symbol at mode {mode:?}: |lambda| = {magnitude:.3e}")]
    DegenerateSymbol { mode: Vec<i64>, magnitude: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("incompatible data: {0}")]
    Incompatible(String),

    #[error("cache format error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
