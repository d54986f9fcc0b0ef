use std::path::PathBuf;

use crate::numerics::QuadratureResult;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature exhausted its budget before meeting the tolerance.
    #[error(
        "quadrature did not converge after {} evaluations (estimate {}, error {})",
        partial.evaluations, partial.value, partial.abs_error
    )]
    Divergence { partial: QuadratureResult },

    #[error("no sign change on [{lo}, {hi}]: h(lo) = {f_lo}, h(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("replicate {index} of experiment '{experiment}' failed: {reason}")]
    Replicate {
        experiment: String,
        index: u64,
        reason: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
