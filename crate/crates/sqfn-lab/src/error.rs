//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite value {value} at cell {index} (x = {coords:?}) while sampling `{what}`")]
    NonFinite {
        what: String,
        index: usize,
        coords: Vec<f64>,
        value: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty kernel dictionary")]
    EmptyDictionary,

    #[error("empty t-ladder: t_min {t_min} exceeds t_max {t_max}")]
    EmptyLadder { t_min: f64, t_max: f64 },

    #[error("aperture saturated: gamma * t_min = {0} covers the whole domain at every scale")]
    SaturatedAperture(f64),

    #[error("region error: {0}")]
    Region(String),

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("run refused: hypothesis clause violated: {clause}")]
    Inadmissible { clause: String },

    #[error("memory budget exceeded: run needs ~{needed} lattice values, budget is {budget}")]
    MemoryBudget { needed: u64, budget: u64 },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {message}")]
    Malformed { path: String, message: String },
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
