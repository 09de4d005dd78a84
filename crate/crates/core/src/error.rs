use thiserror::Error;

/// Errors raised by the profile solvers, the compact-case certificate and the
/// geometry evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolitonError {
    #[error("invalid soliton kind: {0}")]
    InvalidKind(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value out of representable range: {0}")]
    Range(String),

    #[error("no convergence after {iterations} iterations: {context}")]
    NonConvergence { iterations: usize, context: String },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("degenerate 2-plane: tangent vectors are colinear")]
    DegeneratePlane,

    #[error("root certificate rejected: {0}")]
    Certificate(String),

    #[error("quadrature failed on [{lo}, {hi}]: estimated error {error:e}")]
    Quadrature { lo: f64, hi: f64, error: f64 },
}

pub type Result<T> = std::result::Result<T, SolitonError>;
