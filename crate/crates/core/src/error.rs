use thiserror::Error;

/// Errors raised by the planning and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("rotation axis must be a unit vector (norm = {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("cannot compose an empty list of unitaries")]
    EmptyComposition,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("synchronization integer n = {n} too small for rotation angle {theta} (need n > θ/2π)")]
    SyncIntegerTooSmall { n: i64, theta: f64 },

    #[error("composite rotation is not real: |tan γ · sin(α/2)| = {value} exceeds 1")]
    NotReal { value: f64 },

    #[error("exchange link is degenerate: both J and ΔE_z vanish")]
    DegenerateLink,

    #[error("site {site} is out of range for an array of {n} qubits")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("no swap partner for site {site}: every qubit shares its bin")]
    NoPartner { site: usize },

    #[error("configuration is not addressable: all qubits occupy bin {bin}")]
    NotAddressable { bin: i64 },

    #[error("negative bin count {count} for bin {bin}")]
    NegativeCount { bin: i64, count: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
