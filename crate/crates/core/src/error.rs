use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("integral symmetry violated: {0}")]
    Symmetry(String),

    #[error("determinant {0:#b} is not in the sector basis")]
    NotInBasis(u64),

    #[error("operator leaves a basis declared closed (target {0:#b})")]
    BasisLeak(u64),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("Lie algebra dimension exceeded cap {cap} (reached {reached} elements at depth {depth})")]
    DimensionCap {
        cap: usize,
        reached: usize,
        depth: usize,
    },

    #[error("eigensolver did not converge after {restarts} restarts (residual {residual:e})")]
    NoConvergence { restarts: usize, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
