use thiserror::Error;

/// Errors raised by the library. Every variant maps to a contract violation
/// at the command-line surface.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("contract violation at index {index}: {reason}")]
    Contract { index: usize, reason: String },

    #[error("index {index} is past the end of a finite sequence of length {len}")]
    OutOfRange { index: usize, len: usize },

    #[error("partial quotient at index {index} needs about {bits} bits, above the cap of {cap}")]
    TooLarge { index: usize, bits: u64, cap: u64 },

    #[error("expansion needs more than {max_terms} partial quotients")]
    ExpansionTooLong { max_terms: usize },

    #[error("enumeration would visit up to {size:e} tuples, above the cap of {cap}; use the analytic bounds")]
    EnumerationTooLarge { size: f64, cap: u64 },

    #[error("no sign change of log sum |I|^s on [{lo}, {hi}]: values {f_lo} and {f_hi}")]
    NonBracketing { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("precision exhausted: {achieved} of {requested} partial quotients are certified")]
    PrecisionExhausted { achieved: usize, requested: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
