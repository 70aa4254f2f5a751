use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across state preparation, kernel construction, sampling and
/// the command pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Fock truncation at n_max = {n_max} keeps norm {norm:.3e}, below 1 - {budget:.1e}")]
    Truncation { n_max: usize, norm: f64, budget: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical instability: {0}")]
    NumericalInstability(String),

    #[error("kernel for k = {k} failed its certificate: {detail}")]
    Convergence { k: usize, detail: String },

    #[error("no kernel available for k = {k} (have 1..={available})")]
    MissingKernel { k: usize, available: usize },

    #[error("phase coverage incomplete: largest gap between phases is {gap:.4} rad")]
    PhaseCoverage { gap: f64 },

    #[error("synthesis grid of {grid_size} points is too coarse for k_max = {k_max}")]
    GridTooCoarse { grid_size: usize, k_max: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}
