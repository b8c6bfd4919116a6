use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// The split between [`ErrorKind::InvalidInput`] and [`ErrorKind::Numerical`]
/// is what the command line maps to exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("Seiberg bounds violated: {0}")]
    Seiberg(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("pole: {factor} evaluated at distance {distance:e} from its pole lattice")]
    Pole { factor: String, distance: f64 },
    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    NonConvergence { a: f64, b: f64, estimate: f64 },
    #[error("root finding did not converge: {0}")]
    RootNotFound(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("covariance matrix not positive definite (smallest eigenvalue {smallest_eigenvalue:e})")]
    NotPositiveDefinite { smallest_eigenvalue: f64 },
    #[error("replica {replica} has total mass {mass:e}")]
    DegenerateMass { replica: usize, mass: f64 },
    #[error("local time target {target} not reached before horizon {horizon}")]
    TargetNotReached { target: f64, horizon: f64 },
    #[error("step size underflow at t = {t} (gap {gap:e})")]
    StepUnderflow { t: f64, gap: f64 },
    #[error("Loewner map blow-up at t = {t}: |g - W| = {gap:e}")]
    BlowUp { t: f64, gap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    InvalidInput,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_)
            | Error::Seiberg(_)
            | Error::LengthMismatch { .. }
            | Error::Resolution(_) => ErrorKind::InvalidInput,
            _ => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_finite() && gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("gamma = {gamma} is outside (0, 2)")))
    }
}
