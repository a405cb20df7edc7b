use thiserror::Error;

/// Errors produced while configuring, feeding or decoding a sketch.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value {value} is outside the allowed range [0, {max}]")]
    OutOfRange { value: u64, max: u64 },

    #[error("invalid window length {0}")]
    InvalidWindow(u64),

    #[error("invalid range bound {0}")]
    InvalidRange(u64),

    #[error("invalid epsilon {0}")]
    InvalidEpsilon(String),

    #[error(
        "epsilon too small for block algorithm: need {required} blocks but window is {window}"
    )]
    EpsilonTooSmall { required: u64, window: u64 },

    #[error("exact summing required: epsilon is below 1/(2RW)")]
    ExactSummingRequired,

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("pattern length {got} does not match the {expected} blocks of the language")]
    PatternLength { expected: u64, got: u64 },

    #[error("letter index {index} is outside the alphabet of size {size}")]
    LetterOutOfRange { index: u64, size: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("parameters overflow the fixed-width state representation")]
    Overflow,

    #[error("malformed packed state: {0}")]
    Decode(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
