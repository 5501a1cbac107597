use thiserror::Error;

/// Errors raised by the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("degenerate target: {0}")]
    DegenerateTarget(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("simulation blow-up: {0}")]
    Blowup(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
