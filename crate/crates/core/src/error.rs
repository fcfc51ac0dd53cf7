//! Error type shared by every module in the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Mixing angle outside the physical range `[0, pi]`.
    #[error("mixing angle {0} is outside [0, pi]")]
    ThetaOutOfRange(f64),

    /// A scattering matrix failed its unitarity constraints.
    #[error("scattering matrix is not unitary (worst constraint residual {0:.3e})")]
    NonUnitary(f64),

    /// Transition amplitudes exist only between equal total photon numbers.
    #[error("photon number not conserved: ({n}, {m}) -> ({p}, {q})")]
    PhotonNumberMismatch { n: usize, m: usize, p: usize, q: usize },

    /// A photon count or cutoff exceeded the configured per-mode maximum.
    #[error("photon count {requested} exceeds the configured maximum {max}")]
    CapacityExceeded { requested: usize, max: usize },

    /// Coincidence sums are defined only for photon pairs of equal parity.
    #[error("no coincidence sector exists for ({n}, {m}): photon numbers differ in parity")]
    ParityMismatch { n: usize, m: usize },

    /// A state, weight list, or `(t, r)` pair failed its normalization check.
    #[error("{context} is not normalized (residual {residual:.3e})")]
    NotNormalized { context: &'static str, residual: f64 },

    /// Truncation tail bounds must be strictly positive.
    #[error("tail bound epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),

    /// Mean photon numbers must lie in the stated range for the operation.
    #[error("mean photon number must be {expected}, got {value}")]
    InvalidMeanPhotonNumber { value: f64, expected: &'static str },

    /// Detector efficiencies live in `[0, 1]`.
    #[error("detector efficiency {0} is outside [0, 1]")]
    EfficiencyOutOfRange(f64),

    /// An operation received an empty or all-zero argument.
    #[error("{0}")]
    EmptyInput(&'static str),

    /// A textual state spec did not match the grammar.
    #[error("cannot parse state spec: {0}")]
    SpecParse(String),

    /// A computed quantity violated a numeric sanity bound.
    #[error("numeric validation failed: {0}")]
    NumericValidation(String),
}
