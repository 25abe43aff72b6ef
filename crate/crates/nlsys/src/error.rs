use thiserror::Error;

/// Unified error type for the crate.
///
/// Variants mirror the failure modes of the numerical pipeline; the CLI maps
/// them onto its stable exit-code contract (configuration/schema errors exit
/// 2, verification failures exit 1).
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (pole of Gamma,
    /// exponent out of range, s outside (0,1), ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The spectral density fails the ellipticity requirement (degenerate or
    /// negative weight).
    #[error("ellipticity violation: {0}")]
    EllipticityViolation(String),

    /// Exterior-mass evaluation at or outside the domain boundary, where the
    /// integral diverges.
    #[error("boundary divergence at x = {x} (half-width {r})")]
    BoundaryDivergence { x: f64, r: f64 },

    /// Operator assembly requested on a grid the scheme does not support.
    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    /// Two grid functions (or a function and an operator) live on different
    /// grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// Quadrature tail estimate failed to converge below the requested
    /// tolerance.
    #[error("tail divergence: {0}")]
    TailDivergence(String),

    /// Quadrature failed to reach the requested tolerance.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// State left the admissible box of the system (MEMS touching 1).
    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    /// Iteration diverged or exceeded its cap: no solution at this parameter.
    #[error("no solution: {0}")]
    NoSolution(String),

    /// The very first continuation step failed.
    #[error("infeasible start: {0}")]
    InfeasibleStart(String),

    /// Extrapolation requested with too few records near the fold.
    #[error("need more records: {0}")]
    NeedMoreRecords(String),

    /// A dense factorization or eigensolve failed.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// Artifact file does not match the documented schema.
    #[error("schema error: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
