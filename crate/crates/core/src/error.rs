use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter combination that makes a derived quantity singular.
    #[error("singular parameters: {0}")]
    Singular(String),

    /// Adaptive quadrature exhausted its budget; carries the best estimate.
    #[error("quadrature did not converge: estimate {estimate:e}, error estimate {error:e}")]
    Convergence { estimate: f64, error: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Non-finite values or runaway growth during time stepping.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
