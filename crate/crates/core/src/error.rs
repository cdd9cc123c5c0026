//! Error type shared by all modules.

use crate::Vector;
use std::fmt;

/// Library result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of grid construction, quadrature, and solvers.
///
/// Solver variants carry the best iterate found so the caller can inspect
/// how close the run got before giving up.
#[derive(Debug)]
pub enum Error {
    /// Dimension other than 2 or 3.
    UnsupportedDimension { dim: usize },
    /// Grid resolution below the floor or with the wrong parity.
    BadResolution { dim: usize, resolution: usize, reason: &'static str },
    /// Two objects built for different dimensions were combined.
    DimensionMismatch { expected: usize, got: usize },
    /// An integrand produced a non-finite value.
    NonFiniteSample { location: Vector, value: f64 },
    /// L_λ exponent outside the admissible range.
    BadLambda { lambda: f64, reason: &'static str },
    /// Moment exponent p < 1 or non-finite.
    BadExponent { p: f64 },
    /// Asymmetry weight outside [0, 1].
    BadEpsilon { eps: f64 },
    /// Degenerate or inverted support box.
    BadSupportBox { reason: &'static str },
    /// A radial function was non-positive or non-finite at a node.
    BadRadialValue { direction: Vector, value: f64 },
    /// A support function was non-positive or non-finite at a node.
    BadSupportValue { direction: Vector, value: f64 },
    /// A singular matrix where an invertible one is required.
    SingularMatrix,
    /// The queried point lies outside the interior of the body.
    PointNotInterior { point: Vector },
    /// Iteration budget exhausted before the residual dropped below
    /// tolerance; `best` is the most promising iterate seen.
    NoConvergence { context: &'static str, iterations: usize, residual: f64, best: Vector },
    /// Monte-Carlo run asked for fewer samples than the estimator's floor.
    TooFewSamples { samples: usize },
    /// A rejection sampler saw no hits, so its estimate carries no
    /// information at this sample count.
    Inconclusive { context: &'static str },
    /// Serialized body whose grid layout this build cannot reproduce.
    GridMismatch { reason: String },
    /// Malformed body or configuration JSON.
    Json(serde_json::Error),
    /// Underlying I/O failure while reading or writing artifacts.
    Io(std::io::Error),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnsupportedDimension { dim } => {
                write!(f, "unsupported dimension {dim} (expected 2 or 3)")
            }
            Error::BadResolution { dim, resolution, reason } => {
                write!(f, "bad resolution {resolution} for dimension {dim}: {reason}")
            }
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::NonFiniteSample { location, value } => {
                write!(
                    f,
                    "non-finite sample {value} at ({}, {}, {})",
                    location.x, location.y, location.z
                )
            }
            Error::BadLambda { lambda, reason } => {
                write!(f, "bad lambda {lambda}: {reason}")
            }
            Error::BadExponent { p } => write!(f, "bad moment exponent p = {p} (need p >= 1)"),
            Error::BadEpsilon { eps } => write!(f, "bad asymmetry weight eps = {eps} (need 0 <= eps <= 1)"),
            Error::BadSupportBox { reason } => write!(f, "bad support box: {reason}"),
            Error::BadRadialValue { direction, value } => {
                write!(
                    f,
                    "radial function must be positive and finite, got {value} at ({}, {}, {})",
                    direction.x, direction.y, direction.z
                )
            }
            Error::BadSupportValue { direction, value } => {
                write!(
                    f,
                    "support function must be positive and finite, got {value} at ({}, {}, {})",
                    direction.x, direction.y, direction.z
                )
            }
            Error::SingularMatrix => write!(f, "matrix is singular"),
            Error::PointNotInterior { point } => {
                write!(f, "point ({}, {}, {}) is not interior", point.x, point.y, point.z)
            }
            Error::NoConvergence { context, iterations, residual, best } => {
                write!(
                    f,
                    "{context}: no convergence after {iterations} iterations, residual {residual:.3e} at ({}, {}, {})",
                    best.x, best.y, best.z
                )
            }
            Error::TooFewSamples { samples } => {
                write!(f, "need at least 1000 Monte-Carlo samples, got {samples}")
            }
            Error::Inconclusive { context } => {
                write!(f, "{context}: rejection sampling saw no hits")
            }
            Error::GridMismatch { reason } => write!(f, "grid mismatch: {reason}"),
            Error::Json(e) => write!(f, "json: {e}"),
            Error::Io(e) => write!(f, "io: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Json(e) => Some(e),
            Error::Io(e) => Some(e),
            _ => None,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}
