use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the kernel engine, its oracles and the batch front-end.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is out of range ({allowed})")]
    OutOfRange {
        what: &'static str,
        value: String,
        allowed: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eta lookup ({j1}, {j2}) outside table with max lag {max_lag}")]
    LagOutOfRange {
        j1: usize,
        j2: usize,
        max_lag: usize,
    },

    #[error("quadrature did not converge on [{a}, {b}] (estimated error {err:e})")]
    Quadrature { a: f64, b: f64, err: f64 },

    #[error("density matrix is not a valid initial state: {0}")]
    InvalidDensity(String),

    #[error("config line {line}: {msg}")]
    ConfigSyntax { line: usize, msg: String },

    #[error("config key `{key}`: {msg}")]
    ConfigValue { key: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("worker pool: {0}")]
    ThreadPool(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn range(
        what: &'static str,
        value: impl ToString,
        allowed: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            allowed: allowed.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
