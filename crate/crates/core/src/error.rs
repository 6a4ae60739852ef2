use thiserror::Error;

/// Errors surfaced by every fallible operation in the crate.
///
/// The CLI maps [`Error::is_input`] failures to exit code 2 and everything
/// else to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("probability vector does not sum to one (sum = {sum})")]
    SimplexViolation { sum: f64 },

    #[error("identified set is empty: no grid point of the homogeneous parameter is feasible")]
    EmptyIdentifiedSet,

    #[error("every posterior draw has an empty identified set ({skipped} of {total})")]
    AllDrawsInfeasible { skipped: usize, total: usize },

    #[error("simplex iteration limit ({limit}) exceeded")]
    IterationLimit { limit: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The primal and dual forms of an inner program gave different values.
    #[error("numerical failure: primal and dual inner values disagree: {0}")]
    DualityGap(String),

    #[error("unsupported rule: {0}")]
    UnsupportedRule(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True when the failure is caused by the caller's data rather than by
    /// the numerics.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch(_)
                | Error::SimplexViolation { .. }
                | Error::Parse { .. }
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
