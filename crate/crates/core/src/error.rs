use thiserror::Error;

/// Failure modes shared by every computation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LtError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver (bisection, shooting, root finding) did not converge.
    #[error("solver error: {0}")]
    Solver(String),
    /// A computation finished but missed its accuracy target.
    #[error("accuracy error: {what} (achieved {achieved:.3e}, required {required:.3e})")]
    Accuracy {
        what: String,
        achieved: f64,
        required: f64,
    },
    /// Malformed input data (potential grammar, tabulated samples, grids).
    #[error("input error: {0}")]
    Input(String),
    /// The discretization is too coarse for the requested problem.
    #[error("resolution error: {0}")]
    Resolution(String),
}

pub type Result<T> = std::result::Result<T, LtError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LtError::Domain(msg.into()))
}
