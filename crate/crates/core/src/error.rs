use thiserror::Error;

/// Errors produced by the library.
///
/// Validation errors (bad geometry, sections, configs) are distinguished from
/// solver failures so the CLI can map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("invalid cross-section: {0}")]
    Section(String),

    #[error("invalid potential: {0}")]
    Potential(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The plane-wave basis requests Fourier coefficients beyond the stored
    /// range while the stored tail is not negligible.
    #[error(
        "aliasing guard: basis half-width {requested} needs coefficients beyond index {stored}, \
         but the stored tail reaches {tail:.3e} (limit 1e-13); increase the sample count"
    )]
    Aliasing {
        requested: usize,
        stored: usize,
        tail: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations; residual norms: {residuals:?}")]
    SolverNoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("shifted operator stayed indefinite after {retries} shift reductions (last shift {shift:.6e})")]
    IndefiniteShift { retries: usize, shift: f64 },

    #[error("linear solver stalled: relative residual {residual:.3e} after {iterations} iterations")]
    LinearSolveStall { iterations: usize, residual: f64 },
}

impl Error {
    /// True for failures of the numerical solvers (CLI exit code 3);
    /// everything else is input validation (CLI exit code 2).
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::SolverNoConvergence { .. }
                | Error::IndefiniteShift { .. }
                | Error::LinearSolveStall { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
