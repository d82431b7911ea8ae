use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method ran out of iterations or lost its bracket.
    #[error("convergence error: {message}")]
    Convergence {
        message: String,
        /// Best iterate reached before giving up, when one exists.
        best: Option<f64>,
    },

    /// A quadrature did not reach the requested tolerance.
    #[error("accuracy error: {message} (estimate {estimate:e}, error {error:e})")]
    Accuracy {
        message: String,
        estimate: f64,
        error: f64,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn convergence(msg: impl Into<String>, best: Option<f64>) -> Self {
        Error::Convergence {
            message: msg.into(),
            best,
        }
    }
}
