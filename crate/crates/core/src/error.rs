use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("invalid `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// An iterative solver hit its iteration cap. Carries the last iterate so
    /// callers can inspect how far it got.
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverFailure {
        iterate: Vec<f64>,
        residual: f64,
        iterations: usize,
    },

    #[error("certificate violated: residual {residual:e} below bound {bound:e}")]
    CertificateFailure { residual: f64, bound: f64 },

    #[error("feasible set is empty or could not be certified nonempty (violation {violation:e})")]
    EmptySet { violation: f64 },

    #[error("point is infeasible (violation {violation:e})")]
    Infeasible { violation: f64 },

    #[error("step {index}: {source}")]
    Step {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, index: usize) -> Self {
        Error::Step {
            index,
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
