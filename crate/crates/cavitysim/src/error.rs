//! Crate-wide error type.

/// Errors reported by state operations, the compiler, the executor and the
/// text-format parsers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("cavity index {index} out of range (device has {cavities} cavities)")]
    CavityOutOfRange { index: usize, cavities: usize },

    #[error("internal-state index {index} out of range (device has {internals} internal states)")]
    InternalOutOfRange { index: usize, internals: usize },

    #[error("a channel connects the central cavity to a peripheral one; cavity 0 is not a valid channel endpoint")]
    CentralChannel,

    #[error("empty cavity set")]
    EmptyCavitySet,

    #[error("hopping rate omega must be nonzero and finite")]
    InvalidOmega,

    #[error("step index k must be at least 1")]
    ZeroStep,

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("weights occupy {needed} peripheral cavities but the device has only {available}")]
    CapacityExceeded { needed: usize, available: usize },

    #[error("no integer weights within the requested total can represent the probabilities: {0}")]
    Infeasible(String),

    #[error("pi pulse needs two distinct internal states, got {0} twice")]
    DegeneratePiPulse(usize),

    #[error("state has {state_cavities} cavities x {state_internals} internal states but the schedule device has {device_cavities} x {device_internals}")]
    DimensionMismatch {
        state_cavities: usize,
        state_internals: usize,
        device_cavities: usize,
        device_internals: usize,
    },

    #[error("schedule invariant violated: {0}")]
    ScheduleInvariant(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("equal-amplitude check failed: {reason}")]
    EqualAmplitudeFailed { reason: String },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
