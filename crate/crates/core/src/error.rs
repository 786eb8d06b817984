use thiserror::Error;

/// Errors raised by operator construction, flux evaluation, and the solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("polynomial degree {0} outside supported range 1..=15")]
    InvalidDegree(usize),

    #[error("inadmissible state: density {density}, pressure {pressure}")]
    Inadmissible { density: f64, pressure: f64 },

    #[error("inadmissible state in element {element}, node {node}: density {density}, pressure {pressure}")]
    InadmissibleNode {
        element: usize,
        node: usize,
        density: f64,
        pressure: f64,
    },

    #[error("non-finite right-hand side in element {element}")]
    Divergence { element: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("system dimension {dim} exceeds the dense limit {limit}")]
    Size { dim: usize, limit: usize },

    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),

    #[error("timestep is unbounded: all wave speeds vanish")]
    UnboundedTimestep,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
