//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Invalid construction arguments or domain violations (preconditions).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The kernel integral over a sphere diverges when the evaluation radius
    /// equals the sphere radius.
    #[error("singular argument: sphere radius t = {t} equals evaluation radius r = {r}")]
    SingularArgument { r: f64, t: f64 },

    /// A quadrature exhausted its budget before reaching the requested tolerance.
    #[error("tolerance not met: achieved error estimate {achieved:.3e}, requested {requested:.3e}")]
    ToleranceNotMet { achieved: f64, requested: f64 },

    /// Two adjacent radii are too close for the curvature to be computed
    /// reliably; the caller gets a refusal instead of a low-accuracy number.
    #[error("degenerate configuration: radii {i} and {j} have relative gap {gap_rel:.3e} (guard {guard:.1e})")]
    DegenerateConfiguration {
        i: usize,
        j: usize,
        gap_rel: f64,
        guard: f64,
    },

    /// Boundary index outside the radius list.
    #[error("boundary index {index} out of range for a set with {len} radii")]
    IndexOutOfRange { index: usize, len: usize },

    /// A stability operation was invoked on a point that is not stationary.
    #[error("stationarity violated: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    StationarityViolated { residual: f64, tol: f64 },

    /// The diagonally conjugated Jacobian deviates from symmetry, signalling a
    /// quadrature inconsistency.
    #[error("symmetrization defect {defect:.3e} exceeds {tol:.1e}")]
    SymmetrizationDefect { defect: f64, tol: f64 },

    /// A guaranteed sign change could not be bracketed (quadrature fault).
    #[error("bracket failure: {0}")]
    BracketFailure(String),

    /// Root solve exhausted its iteration budget; carries the best iterate.
    #[error("solver did not converge after {iterations} iterations: best residual {residual:.3e}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Vec<f64>,
    },

    /// The ODE integrator underflowed its step size away from any recognized
    /// singular event.
    #[error("step size underflow at t = {t:.6e} away from any recognized singular event")]
    StepSizeUnderflow { t: f64 },
}

impl Error {
    /// CLI exit code contract: 2 config error, 3 numerical failure, 4 budget exhausted.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidInput(_) | Error::IndexOutOfRange { .. } => 2,
            Error::NonConvergence { .. } => 4,
            _ => 3,
        }
    }
}
