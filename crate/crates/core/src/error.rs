use alloc::string::String;
use core::fmt;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Model parameters violate a structural constraint.
    InvalidSpec(String),
    /// Two single-particle energies coincide; the integrals of motion are
    /// singular there.
    DegenerateEpsilon {
        first: usize,
        second: usize,
    },
    PreconditionViolated(String),
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// An eigenvalue iteration did not converge.
    ConvergenceFailure(String),
    /// The interpolated discriminant does not reproduce its samples.
    IllConditioned {
        residual: f64,
    },
    /// `D(g)` vanishes identically, so it has no isolated roots.
    DegenerateDiscriminant,
    AmbiguousClustering {
        gap: f64,
        tol: f64,
    },
    TrackingAmbiguity {
        step: usize,
    },
    ClassificationConflict {
        location: Complex64,
        multiplicity: usize,
        detail: String,
    },
    StepUnderflow {
        parameter: f64,
    },
    BracketInvalid {
        lo: f64,
        hi: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidSpec(msg) => write!(f, "invalid model spec: {msg}"),
            Error::DegenerateEpsilon { first, second } => {
                write!(
                    f,
                    "single-particle energies of levels {first} and {second} coincide"
                )
            }
            Error::PreconditionViolated(msg) => write!(f, "precondition violated: {msg}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::ConvergenceFailure(what) => write!(f, "no convergence: {what}"),
            Error::IllConditioned { residual } => {
                write!(
                    f,
                    "discriminant reconstruction ill-conditioned (relative residual {residual:e})"
                )
            }
            Error::DegenerateDiscriminant => write!(f, "discriminant vanishes identically"),
            Error::AmbiguousClustering { gap, tol } => {
                write!(
                    f,
                    "ambiguous root clustering: inter-cluster gap {gap:e} with tolerance {tol:e}"
                )
            }
            Error::TrackingAmbiguity { step } => {
                write!(f, "eigenvalue tracking ambiguous at loop step {step}")
            }
            Error::ClassificationConflict {
                location,
                multiplicity,
                detail,
            } => write!(
                f,
                "classification conflict at g = {}{:+}i (multiplicity {multiplicity}): {detail}",
                location.re, location.im
            ),
            Error::StepUnderflow { parameter } => {
                write!(f, "continuation step underflow at parameter {parameter}")
            }
            Error::BracketInvalid { lo, hi } => {
                write!(
                    f,
                    "bracket [{lo}, {hi}] does not enclose a crossing collision"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
