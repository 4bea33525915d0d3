use thiserror::Error;

/// Errors produced by parameter validation and the numerical engines.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical parameter is out of its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A time grid or step size cannot be used for integration.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// A density matrix violates positivity or trace constraints.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A sweep specification is inconsistent or an analysis cannot be
    /// performed on the given grid.
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T> = std::result::Result<T, Error>;
