use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error("eigensolver did not converge within its budget of {budget} iterations")]
    NoConvergence { budget: usize },

    #[error(
        "perplexity calibration could not bracket the bandwidth for row {row} \
         (duplicate points?)"
    )]
    PerplexityBracket { row: usize },

    #[error("non-finite coordinates at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("unsupported document schema {found:?}, expected {expected:?}")]
    Schema { expected: String, found: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numerical routine (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::PerplexityBracket { .. }
                | Error::NonFinite { .. }
                | Error::Degenerate(_)
        )
    }
}
