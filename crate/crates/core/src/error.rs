use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: expected {expected} values, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("singular value: {0}")]
    Singular(String),

    /// The solver refused to take a step. The state before the step is kept so
    /// callers can dump it.
    #[error("step rejected at t = {time}: {reason}")]
    StepRejected {
        time: f64,
        reason: String,
        snapshot: Option<Box<crate::domain::State>>,
    },

    #[error("CFL violation: dt = {dt} exceeds the admissible {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("vacuum cell with nonzero momentum at index {0}: kinetic energy is infinite")]
    VacuumMomentum(usize),

    #[error("misaligned time grids: {0}")]
    TimeGrid(String),

    #[error("insufficient data: {0}")]
    Insufficient(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot format: {0}")]
    Format(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
