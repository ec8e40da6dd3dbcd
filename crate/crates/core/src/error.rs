use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or run-spec field is out of range. `field` names the
    /// offending input so front ends can report it verbatim.
    #[error("invalid {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("mode count mismatch: grid has {expected} modes, state has {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("state dimension {found} does not match the system dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("integration produced a non-finite amplitude at t = {t}")]
    NonFinite { t: f64 },

    #[error("step {dt} exceeds the RK4 stability bound {bound}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("dense generator of dimension {dim} exceeds the oracle cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("non-physical density matrix: {0}")]
    NonPhysical(String),

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field,
            reason: reason.into(),
        }
    }
}
