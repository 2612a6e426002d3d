use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("number of mesh intervals must be even and at least 4, got {0}")]
    InvalidIntervalCount(usize),

    #[error("perturbation parameter must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("mesh grading parameter sigma must be >= 1, got {0}")]
    InvalidSigma(f64),

    #[error("breakpoint constant must be positive, got {0}")]
    InvalidBreakpointConstant(f64),

    #[error("breakpoint 1/2 - C*eps = {0} lies outside (0, 1/2)")]
    BreakpointOutOfRange(f64),

    #[error("polynomial degree must be between 1 and {max}, got {degree}")]
    InvalidDegree { degree: usize, max: usize },

    #[error("quadrature rule needs at least one point")]
    EmptyQuadrature,

    #[error("mesh nodes must start at 0, end at 1 and strictly increase (violated at node {0})")]
    NonIncreasingMesh(usize),

    #[error("coefficient condition violated: {0}")]
    Coefficients(String),

    #[error("matrix is singular to working precision at pivot {index}")]
    SingularPivot { index: usize },

    #[error("problem has no exact solution attached")]
    MissingExactSolution,

    #[error("exact solution has no smooth/layer decomposition attached")]
    MissingDecomposition,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical failures are distinguished from bad input so the CLI can
    /// map them to separate exit codes.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::SingularPivot { .. })
    }
}
