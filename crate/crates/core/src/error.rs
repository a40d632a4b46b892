use thiserror::Error;

/// Unified error type for the simulation core.
#[derive(Error, Debug)]
pub enum Error {
    /// An argument violates a documented precondition of the operation.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Structured input (matrix blocks, data rows) failed shape or sign checks.
    #[error("malformed input: {0}")]
    MalformedInput(String),
    /// Text input failed to parse; `line` is 1-based in the source.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A mathematical precondition of the routine does not hold at runtime.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The linear system defining the optimum is singular or the solve failed.
    #[error("ill-posed problem: {0}")]
    IllPosed(String),
    /// Series constant with exponent gap b - a < 1: the sum diverges.
    #[error("divergent series constant: b - a = {0} < 1")]
    DivergentSeries(f64),
    /// No feasible parameter choice exists within the search budget.
    #[error("infeasible constants: {0}")]
    Infeasible(String),
    /// The run record lacks the resolution this analysis needs.
    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),
    /// An iterate left the representable range during a run.
    #[error("numerical failure at iteration {t}: non-finite state")]
    NumericalFailure { t: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
