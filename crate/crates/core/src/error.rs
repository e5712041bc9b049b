use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: (L = {left_half_width}, N = {left_len}) vs (L = {right_half_width}, N = {right_len})")]
    GridMismatch {
        left_half_width: f64,
        left_len: usize,
        right_half_width: f64,
        right_len: usize,
    },

    #[error("lambda = {lambda} lies within {tolerance:e} of the essential line Re lambda = -1")]
    EssentialLine { lambda: Complex64, tolerance: f64 },

    #[error("xi = 0 has no boundary extension")]
    ZeroFrequency,

    #[error("xi = {xi} lies in the resonance zone |xi| = sqrt(pi)")]
    Resonance { xi: f64 },

    #[error("the eigenfunction at xi = {xi} has its pole {pole_distance:e} from the real axis, below the {required:e} this grid resolves")]
    Unresolved {
        xi: f64,
        pole_distance: f64,
        required: f64,
    },

    #[error("lambda = {lambda} is a pole of the resolvent at xi = {xi} (|omega| = {modulus:e})")]
    Pole {
        lambda: Complex64,
        xi: f64,
        modulus: f64,
    },

    #[error("root bracket failed for xi = {xi}: {reason}")]
    Bracket { xi: f64, reason: String },

    #[error("integration step rejected: {0}")]
    StepRejected(String),

    #[error("fit rejected: {0}")]
    FitRejected(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
