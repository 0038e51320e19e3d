use thiserror::Error;

/// Errors raised anywhere in the transformation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Input data violates a structural or symmetry requirement.
    #[error("validation error: {0}")]
    Validation(String),

    /// An index lies outside the declared spin-orbital range.
    #[error("index {index} out of range for {limit} spin-orbitals")]
    Bounds { index: usize, limit: usize },

    /// A configured size limit would be exceeded.
    #[error("capacity exceeded: {what} ({size} > limit {limit})")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// An operation received an operator outside its domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A vanishing energy denominator was met in the amplitude equations.
    #[error("singular denominator |D| = {denominator:.3e} for term {term}")]
    Singularity { term: String, denominator: f64 },

    /// The amplitude iteration did not reach tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Divergence { iterations: usize, residual: f64 },

    /// An operator does not have the block structure the caller assumed.
    #[error("structure error: {0}")]
    Structure(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// A pipeline stage failed; the exit code follows the cause.
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Parse { .. }
            | Error::Argument(_)
            | Error::Validation(_)
            | Error::Io(_) => 2,
            Error::Singularity { .. } | Error::Divergence { .. } => 3,
            Error::Capacity { .. } => 4,
            Error::Bounds { .. } | Error::Domain(_) | Error::Structure(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
        }
    }
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
