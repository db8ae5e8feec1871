use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The curve violates a geometric precondition (unit speed, injectivity).
    #[error("geometry error: {0}")]
    Geometry(String),

    /// An input parameter is outside its admissible range.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// The transverse estimates require `a/beta > 2` and `2/beta > gamma_plus`.
    #[error("outside the transverse regime: a/beta = {ratio} (needs > 2), beta*gamma_plus/2 = {coupling} (needs < 1)")]
    Regime { ratio: f64, coupling: f64 },

    /// Operator has no eigenvalue below zero where one was required.
    #[error("no negative eigenvalue (lowest computed value {lowest})")]
    NoBoundState { lowest: f64 },

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// An iterative eigensolver ran out of budget.
    #[error("eigensolver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    /// True for failures of an iterative or integrating routine, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::Numerical(_) | Error::NotConverged { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
