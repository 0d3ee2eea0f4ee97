use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of a force law or solver.
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid beam curve: {0}")]
    InvalidCurve(String),

    #[error("equilibrium bracket error: {0}")]
    Bracket(String),

    /// One message per violated scenario invariant.
    #[error("scenario is infeasible: {}", .0.join("; "))]
    Feasibility(Vec<String>),

    #[error("event watchdog tripped after {events} events at t = {t_s} s")]
    Watchdog { events: usize, t_s: f64 },

    #[error("{what} did not converge (best residual {best_residual})")]
    NoConvergence { what: String, best_residual: f64 },

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error("trace contains no complete cycle")]
    InsufficientTrace,

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
