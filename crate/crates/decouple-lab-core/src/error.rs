use alloc::string::String;
use core::fmt;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scale parameter (R, r, delta, ...) is outside its admissible range.
    InvalidScale(String),
    /// A dimension parameter (d, m) is outside its admissible range.
    InvalidDimension(String),
    /// An operation received an empty collection it cannot work with.
    EmptyInput(String),
    /// A numeric input lies outside the operation's domain.
    Domain(String),
    /// A tube family does not cover every cap present in the input.
    IncompleteCover(String),
    /// An enumeration exceeded its point budget and subsampling was disabled.
    Budget(String),
    /// A parameter lies outside the range required by a closed-form formula.
    OutOfRange(String),
    /// Energy integral requested on fewer than two atoms.
    UndefinedEnergy,
    /// Quadrature resolution is insufficient for the requested scale.
    Resolution(String),
    /// Inputs carry inconsistent ambient scales.
    ScaleMismatch(String),
    /// Too few samples for a fit.
    InsufficientData(String),
    /// No subdivision pattern achieves the requested dimension.
    UnachievableDimension(String),
    /// A required net scale is missing from the input map.
    IncompleteInput(String),
    /// A decoupling case violates its own invariants.
    InvalidCase(String),
    /// A region descriptor contains no sample points.
    EmptyRegion(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidScale(s) => write!(f, "invalid scale: {s}"),
            Error::InvalidDimension(s) => write!(f, "invalid dimension: {s}"),
            Error::EmptyInput(s) => write!(f, "empty input: {s}"),
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::IncompleteCover(s) => write!(f, "incomplete cover: {s}"),
            Error::Budget(s) => write!(f, "budget exhausted: {s}"),
            Error::OutOfRange(s) => write!(f, "out of range: {s}"),
            Error::UndefinedEnergy => write!(f, "energy undefined for a single atom"),
            Error::Resolution(s) => write!(f, "insufficient resolution: {s}"),
            Error::ScaleMismatch(s) => write!(f, "scale mismatch: {s}"),
            Error::InsufficientData(s) => write!(f, "insufficient data: {s}"),
            Error::UnachievableDimension(s) => write!(f, "unachievable dimension: {s}"),
            Error::IncompleteInput(s) => write!(f, "incomplete input: {s}"),
            Error::InvalidCase(s) => write!(f, "invalid case: {s}"),
            Error::EmptyRegion(s) => write!(f, "empty region: {s}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
