use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid mesh: {0}")]
    Mesh(String),

    #[error("invalid boundary specification: {0}")]
    Boundary(String),

    #[error("point ({x}, {y}) lies outside the plate")]
    OutsideDomain { x: f64, y: f64 },

    #[error("invalid material: {0}")]
    Material(String),

    #[error("design field value {value} of element {element} outside [{lower}, 1]")]
    DesignOutOfBounds {
        element: usize,
        value: f64,
        lower: f64,
    },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("dynamic stiffness is singular at omega = {omega} rad/s")]
    Singular { omega: f64 },

    #[error("degenerate response: {0}")]
    DegenerateResponse(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("optimization aborted at iteration {iteration}: {source}")]
    Optimization {
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
