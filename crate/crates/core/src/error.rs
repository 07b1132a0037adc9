use crate::expr::ExprError;
use thiserror::Error;

/// Errors raised by the numerical layers of the crate.
///
/// Locations are reported as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),
    #[error("step size collapsed at x = {x:.6e}")]
    StepSizeCollapse { x: f64 },
    #[error("maximum number of steps ({max_steps}) exceeded at x = {x:.6e}")]
    TooManySteps { x: f64, max_steps: usize },
    #[error("non-finite state (overflow) at x = {x:.6e}")]
    Overflow { x: f64 },
    #[error("degenerate state at x = {x:.6e}: {what}")]
    Degenerate { x: f64, what: String },
    #[error("degenerate zero at x = {x:.6e}: |u'| = {slope:.3e}")]
    DegenerateZero { x: f64, slope: f64 },
    #[error("no bracket found: {0}")]
    NoBracket(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent result: {0}")]
    Inconsistent(String),
    #[error("quadrature did not converge on [{a:.6e}, {b:.6e}] (error estimate {err:.3e})")]
    Quadrature { a: f64, b: f64, err: f64 },
    #[error("linear variational system failed: {0}")]
    Variational(String),
    #[error("shooting failed: {0}")]
    Shooting(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
