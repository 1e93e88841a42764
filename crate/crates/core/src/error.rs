use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported unit conversion: {from} -> {to}")]
    UnsupportedUnit { from: String, to: String },

    #[error("unknown species `{0}`")]
    UnknownSpecies(String),

    #[error("invalid source configuration: {0}")]
    InvalidConfiguration(String),

    #[error("spheres {0} and {1} overlap")]
    Overlap(usize, usize),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("point is not stationary: gradient residual {residual:e} exceeds bound {bound:e}")]
    NotStationary { residual: f64, bound: f64 },

    #[error("no stationary point found: {0}")]
    NoStationaryPoint(String),

    #[error("no inner saddle found: {0}")]
    NoSaddle(String),

    #[error("optimisation failed: {0}")]
    OptimizationFailed(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),

    #[error("protocol mismatch: {0}")]
    ProtocolMismatch(String),

    #[error("incomplete baseline: {0}")]
    IncompleteBaseline(String),

    #[error("unsupported output format `{0}`")]
    UnsupportedFormat(String),

    #[error("serialization failed: {0}")]
    Serialization(String),
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::UnsupportedUnit { .. } => "unsupported-unit",
            Error::UnknownSpecies(_) => "unknown-species",
            Error::InvalidConfiguration(_) => "invalid-configuration",
            Error::Overlap(..) => "overlap",
            Error::UnsupportedConfiguration(_) => "unsupported-configuration",
            Error::NotStationary { .. } => "not-stationary",
            Error::NoStationaryPoint(_) => "no-stationary-point-found",
            Error::NoSaddle(_) => "no-saddle",
            Error::OptimizationFailed(_) => "optimization-failed",
            Error::NumericalFailure(_) => "numerical-failure",
            Error::InvalidTrajectory(_) => "invalid-trajectory",
            Error::ProtocolMismatch(_) => "protocol-mismatch",
            Error::IncompleteBaseline(_) => "incomplete-baseline",
            Error::UnsupportedFormat(_) => "unsupported-format",
            Error::Serialization(_) => "serialization",
        }
    }
}

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
