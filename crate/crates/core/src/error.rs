use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::modefinder::{ModeSet, Rect};

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside its admissible range.
    InvalidInput(String),
    /// The frequency sits (numerically) on a pole of n².
    PoleEvaluation { omega: Complex64 },
    /// Operation needs a Lorentz material.
    NotDispersive,
    /// |N| fell below the configured tolerance: the frequency is a natural frequency.
    DenominatorZero { omega: Complex64 },
    /// The argument-principle contour passes (numerically) through a zero.
    ContourThroughZero { at: Complex64 },
    /// Subdivision ran out of depth with cells that could not be resolved.
    MaxDepthExceeded(Box<UnresolvedSearch>),
    /// The quarter-wave polynomial degenerates for equal indices.
    DegenerateRatio,
    /// An iteration did not converge.
    NoConvergence { what: &'static str, iterations: usize },
    /// The canonical-product argument coincides with an eigenvalue (log-space only).
    EigenvalueHit { index: i64 },
    /// |lambda_m| / (pi |m|) left [0.5, 2] on the retained tail.
    RatioConditionViolated { index: i64, ratio: f64 },
    /// Least-squares decay fit residual above threshold.
    FitUnstable { residual: f64 },
    /// Tail estimate of a truncated product too large relative to the product.
    TruncationTooSmall { tail_error: f64, log_abs: f64 },
    /// Mode search on stacks with dispersive semi-infinite media is not supported.
    DispersiveAmbient,
}

/// Partial outcome of a search that left unresolved cells behind.
#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedSearch {
    pub found: ModeSet,
    pub unresolved: Vec<Rect>,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::PoleEvaluation { omega } => {
                write!(f, "refractive index evaluated on a pole at {omega}")
            }
            Error::NotDispersive => f.write_str("material is not dispersive"),
            Error::DenominatorZero { omega } => {
                write!(f, "transfer denominator vanishes at {omega} (natural frequency)")
            }
            Error::ContourThroughZero { at } => {
                write!(f, "contour passes through a zero near {at}")
            }
            Error::MaxDepthExceeded(s) => write!(
                f,
                "subdivision depth exhausted with {} unresolved cell(s), {} mode(s) found",
                s.unresolved.len(),
                s.found.modes.len()
            ),
            Error::DegenerateRatio => f.write_str("index ratio 1 gives a degenerate polynomial"),
            Error::NoConvergence { what, iterations } => {
                write!(f, "{what} did not converge in {iterations} iterations")
            }
            Error::EigenvalueHit { index } => {
                write!(f, "argument coincides with eigenvalue m = {index}")
            }
            Error::RatioConditionViolated { index, ratio } => {
                write!(f, "|lambda_m|/(pi m) = {ratio} at m = {index} is outside [0.5, 2]")
            }
            Error::FitUnstable { residual } => {
                write!(f, "decay fit residual {residual} above threshold")
            }
            Error::TruncationTooSmall { tail_error, log_abs } => write!(
                f,
                "tail error estimate {tail_error} exceeds 1% of |log L| = {log_abs}"
            ),
            Error::DispersiveAmbient => {
                f.write_str("mode search requires non-dispersive semi-infinite media")
            }
        }
    }
}

impl core::error::Error for Error {}
