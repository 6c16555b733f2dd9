//! Error type shared across the crate.

use std::fmt;

use crate::group::GroupTag;

/// Errors raised by group operations, maps, and simulations.
#[derive(Debug, Clone, PartialEq)]
pub enum LieError {
    /// Two elements with different group tags were combined.
    TagMismatch { left: GroupTag, right: GroupTag },
    /// Frame labels do not chain: composing `g_{AB} g_{CD}` with `B != C`.
    FrameMismatch { expected: String, found: String },
    /// The matrix fails the defining relations of its claimed group.
    NotInGroup { tag: GroupTag, residual: f64 },
    /// The matrix fails the linear constraints of its claimed Lie algebra.
    NotInAlgebra { tag: GroupTag, residual: f64 },
    /// Determinant too close to zero for a reliable inverse.
    NearSingular { determinant_modulus: f64 },
    /// Conjugation drifted out of the algebra beyond tolerance.
    NumericalDrift { residual: f64 },
    /// hat/vee coordinates are only defined for SO(3) and SE(3).
    NoCanonicalCoordinates { tag: GroupTag },
    /// Input contains NaN or infinite entries.
    NonFinite,
    /// An eigenvalue lies on the closed non-positive real axis, outside the
    /// domain of the principal logarithm.
    BranchDomain { eigenvalue: (f64, f64) },
    /// The principal logarithm exists but does not satisfy the algebra
    /// constraints of the tag within tolerance.
    LogEscapesAlgebra { residual: f64 },
    /// The log power series was evaluated outside its convergence region.
    OutOfConvergenceRegion { distance_from_identity: f64 },
    /// An iterative kernel (matrix square root, polar factor) failed to
    /// converge or hit a singular iterate.
    IterationFailed { kernel: &'static str },
    /// Rejection sampling could not produce a state with the requested
    /// offset after the attempt budget.
    InfeasibleOffset { attempts: usize },
    /// The requested fit window contains no usable signal.
    InsufficientSignal,
    /// Smallest Jacobian singular value fell below the guard threshold
    /// with damping disabled.
    NearSingularity { sigma_min: f64 },
    /// Vector or joint dimensions do not match.
    DimensionMismatch { expected: usize, found: usize },
    /// A scenario or configuration value violates its invariants.
    InvalidScenario(String),
    /// An error raised inside a simulation step, with the step index.
    AtStep { step: usize, source: Box<LieError> },
}

impl LieError {
    /// Wraps an error with the simulation step at which it occurred.
    pub fn at_step(self, step: usize) -> LieError {
        LieError::AtStep {
            step,
            source: Box::new(self),
        }
    }

    /// The innermost error, unwrapping any step annotations.
    pub fn root_cause(&self) -> &LieError {
        match self {
            LieError::AtStep { source, .. } => source.root_cause(),
            other => other,
        }
    }
}

impl fmt::Display for LieError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieError::TagMismatch { left, right } => {
                write!(f, "group tag mismatch: {left} vs {right}")
            }
            LieError::FrameMismatch { expected, found } => {
                write!(f, "frame mismatch: expected {expected}, found {found}")
            }
            LieError::NotInGroup { tag, residual } => {
                write!(f, "matrix is not in {tag} (residual {residual:.3e})")
            }
            LieError::NotInAlgebra { tag, residual } => {
                write!(f, "matrix is not in the algebra of {tag} (residual {residual:.3e})")
            }
            LieError::NearSingular { determinant_modulus } => {
                write!(f, "matrix is near singular (|det| = {determinant_modulus:.3e})")
            }
            LieError::NumericalDrift { residual } => {
                write!(f, "conjugation left the algebra (residual {residual:.3e})")
            }
            LieError::NoCanonicalCoordinates { tag } => {
                write!(f, "no canonical twist coordinates for {tag}")
            }
            LieError::NonFinite => write!(f, "input contains non-finite entries"),
            LieError::BranchDomain { eigenvalue } => write!(
                f,
                "eigenvalue {:.6} + {:.6}i lies on the non-positive real axis; \
                 principal logarithm undefined",
                eigenvalue.0, eigenvalue.1
            ),
            LieError::LogEscapesAlgebra { residual } => {
                write!(f, "principal logarithm left the algebra (residual {residual:.3e})")
            }
            LieError::OutOfConvergenceRegion { distance_from_identity } => write!(
                f,
                "log series requires ||g - I|| < 1, got {distance_from_identity:.6}"
            ),
            LieError::IterationFailed { kernel } => {
                write!(f, "{kernel} iteration failed to converge")
            }
            LieError::InfeasibleOffset { attempts } => {
                write!(f, "could not sample a feasible offset state in {attempts} attempts")
            }
            LieError::InsufficientSignal => {
                write!(f, "error signal is at the numerical floor over the requested window")
            }
            LieError::NearSingularity { sigma_min } => {
                write!(f, "Jacobian near singular (sigma_min = {sigma_min:.3e}) and damping is 0")
            }
            LieError::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            LieError::InvalidScenario(msg) => write!(f, "invalid scenario: {msg}"),
            LieError::AtStep { step, source } => write!(f, "at step {step}: {source}"),
        }
    }
}

impl std::error::Error for LieError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            LieError::AtStep { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, LieError>;
