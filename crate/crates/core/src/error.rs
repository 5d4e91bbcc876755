use thiserror::Error;

use crate::numerics::QuadratureResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A formal marginal under the noninformative prior is zero or infinite.
    #[error("improper marginal: {0}")]
    ImproperMarginal(String),

    /// The data admit no proper training sample for the requested family.
    #[error("no proper training sample: {0}")]
    NoTrainingSample(String),

    #[error("quadrature did not converge ({message}); partial value {} with error estimate {}", partial.value, partial.abs_error_estimate)]
    Quadrature {
        message: String,
        partial: QuadratureResult,
    },

    /// Exact enumeration was requested beyond its size guard.
    #[error("size limit exceeded: {0}")]
    Size(String),

    #[error("rank deficient design: {0}")]
    RankDeficient(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
