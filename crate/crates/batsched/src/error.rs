use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A time literal could not be represented exactly at the configured
    /// tick resolution, or was malformed.
    #[error("invalid time value `{value}`: {reason}")]
    TimeParse { value: String, reason: String },

    /// A value failed a domain invariant (negative duration, zero period, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The priority-ordering assumption does not hold for a task pair, so
    /// the analytic model is not applicable to this input.
    #[error("priority ordering violated at level {level} ({higher} vs {lower}): {detail}")]
    AssumptionViolation {
        level: usize,
        higher: String,
        lower: String,
        detail: String,
    },

    /// A waveform query fell outside the simulated window.
    #[error("query at {at} is outside window [{start}, {end})")]
    OutOfWindow {
        at: String,
        start: String,
        end: String,
    },

    /// A scenario or battery file could not be read or parsed.
    #[error("cannot load {path}: {reason}")]
    FileFormat { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
