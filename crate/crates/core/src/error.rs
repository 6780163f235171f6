//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// An atom specification violated its invariants.
    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    /// A laser drive violated its invariants.
    #[error("invalid drive: {0}")]
    InvalidDrive(String),

    /// A density matrix failed validation.
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    /// The steady state is not unique (or numerically indistinguishable from
    /// non-unique): the kernel of the trace-constrained generator is not
    /// one-dimensional to within the conditioning tolerance.
    #[error("degenerate steady state ({detail}); reciprocal condition estimate {rcond:.3e}")]
    DegenerateSteadyState { rcond: f64, detail: String },

    /// Fixed-step integration lost too much trace; the step is too large for
    /// the fastest frequency in the generator.
    #[error("integration step too large: trace drift {trace_drift:.3e} exceeds 1e-6")]
    StepTooLarge { trace_drift: f64 },

    /// A scan grid was empty, non-finite or not strictly monotone.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The requested column does not exist in a scan result.
    #[error("no such column: {0}")]
    NoSuchColumn(String),

    /// The maximum of a scanned column sits on the grid edge.
    #[error("peak not bracketed: {0}")]
    PeakNotBracketed(String),

    /// A half-maximum crossing lies outside the scanned grid.
    #[error("half-maximum not bracketed: {0}")]
    HalfMaxNotBracketed(String),

    /// The closed-form denominator vanished; the steady state is degenerate
    /// (the same physics that makes the linear solve singular).
    #[error("division by zero in closed form: {0}")]
    DivisionByZero(String),

    /// The damping coefficient is not positive, so no Doppler temperature is
    /// defined.
    #[error("not cooling: damping coefficient {beta:.3e} kg/s is not positive")]
    NotCooling { beta: f64 },

    /// A numeric optimizer converged onto the edge of its search interval.
    #[error("optimum at search boundary: omega_st = {omega_st:.6e} rad/s")]
    OptimumAtBoundary { omega_st: f64 },

    /// An internal numerical guarantee was violated; indicates a bug.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    /// Attach the offending scan abscissa to a propagated solver error.
    pub fn at_grid_point(self, name: &str, value: f64) -> Error {
        match self {
            Error::DegenerateSteadyState { rcond, detail } => Error::DegenerateSteadyState {
                rcond,
                detail: format!("{detail}; at {name} = {value:.6e}"),
            },
            other => other,
        }
    }
}
