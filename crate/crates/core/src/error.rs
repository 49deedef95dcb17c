use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("elliptic parameter m = {0} outside the supported domain")]
    EllipticDomain(f64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("coincident sample points at cell {cell}")]
    CoincidentPoints { cell: usize },

    #[error("ambiguous branch at cell {cell}: angle jump {jump:.6} rad is too close to pi")]
    AmbiguousBranch { cell: usize, jump: f64 },

    #[error("curve does not close: winding estimate {estimate} is not an integer")]
    NonIntegerWinding { estimate: f64 },

    #[error("quadrature did not converge (error estimate {estimate:e})")]
    Quadrature { estimate: f64 },

    #[error("root finding failed at node {node}")]
    RootFind { node: usize },

    #[error("window length vanishes: sum of cos(theta) ds = {0:e}")]
    ZeroWindow(f64),

    #[error("sequence is not zero-mean (sum = {sum:e})")]
    NonZeroMean { sum: f64 },

    #[error("field mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("solver failed at step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: SolverError,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error(
        "Newton iteration did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NewtonDivergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("singular Jacobian (condition estimate {condition_estimate:e})")]
    SingularJacobian { condition_estimate: f64 },

    #[error("residual is not finite")]
    NonFinite,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
