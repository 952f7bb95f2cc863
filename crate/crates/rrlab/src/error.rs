use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    /// The doubling re-check disagreed beyond the guard-bit tolerance.
    #[error("precision too low: {0}")]
    PrecisionTooLow(String),

    /// An integer or trace would exceed the representability cap.
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A fifth root was requested for a point that carries no angle.
    #[error("missing angle: point was not built from a unit-circle angle")]
    MissingAngle,

    /// Depth-doubling stability check failed for a series/continued-fraction value.
    #[error("non-convergence: {0}")]
    NonConvergence(String),

    /// Operation requires 5 | m (or 5 ∤ m) and the argument is in the wrong class.
    #[error("wrong residue class: m = {0}")]
    WrongResidueClass(u64),

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
