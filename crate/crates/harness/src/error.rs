use thiserror::Error;

/// Errors raised by the runner, the trajectory log and the bridge.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Engine(#[from] sportsim_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("malformed trajectory log: {0}")]
    Log(String),
    #[error("trajectory log hash mismatch: stored {stored}, computed {computed}")]
    Hash { stored: String, computed: String },
    #[error("log written by engine {log}, this engine is {engine}")]
    Incompatible { log: String, engine: String },
    #[error("protocol error: {0}")]
    Protocol(String),
    #[error("handshake failed: {0}")]
    Handshake(String),
    #[error("cannot reach {endpoint} after {attempts} attempts: {last}")]
    Connection {
        endpoint: String,
        attempts: u32,
        last: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Process exit status: 2 for configuration problems, 3 for faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Engine(sportsim_core::Error::Config(_)) => 2,
            _ => 3,
        }
    }
}

/// Hex digest of a SHA-256 hash.
pub fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
