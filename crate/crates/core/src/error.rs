use std::fmt;

/// Result alias for all fallible library operations.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the analysis and simulation layers.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A transport delay was negative.
    NegativeDelay(f64),
    /// An operation that needs a nonzero polynomial got the zero polynomial.
    ZeroPolynomial,
    /// A transfer-function evaluation divided by exactly zero at `s = jw`.
    SingularEvaluation { omega: f64 },
    /// The loop structure itself is degenerate (for example `1 - Ga*Gam`
    /// vanishes identically, so the equivalent controller does not exist).
    SingularStructure(String),
    /// The iterative root finder could not push the residual below its bound.
    RootFinding { residual: f64 },
    /// A precondition on user-supplied parameters failed.
    InvalidParameter(String),
    /// A structural identity that must hold by construction failed, which
    /// indicates a block-diagram wiring bug rather than a user error.
    IdentityCheck {
        what: &'static str,
        omega: f64,
        residual: f64,
    },
    /// Configuration file or override problem.
    Config(String),
    /// A simulation output exceeded the divergence bound.
    Divergence { time: f64 },
    /// Non-finite value produced where a finite one is required.
    NonFinite(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NegativeDelay(tau) => write!(f, "transport delay must be >= 0, got {tau}"),
            Error::ZeroPolynomial => write!(f, "operation undefined for the zero polynomial"),
            Error::SingularEvaluation { omega } => {
                write!(f, "singular transfer-function evaluation at omega = {omega} rad/s")
            }
            Error::SingularStructure(why) => write!(f, "singular loop structure: {why}"),
            Error::RootFinding { residual } => {
                write!(f, "root finding failed to converge (residual {residual:.3e})")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::IdentityCheck { what, omega, residual } => write!(
                f,
                "structural identity `{what}` violated at omega = {omega} rad/s (residual {residual:.3e})"
            ),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Divergence { time } => {
                write!(f, "simulation diverged at t = {time:.6} s")
            }
            Error::NonFinite(what) => write!(f, "non-finite value produced in {what}"),
        }
    }
}

impl std::error::Error for Error {}
