use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (deviation {deviation:.3e} exceeds {tolerance:.3e})")]
    NotHermitian { deviation: f64, tolerance: f64 },
    #[error("members {first} and {second} do not commute (deviation {deviation:.3e})")]
    NotCommuting {
        first: usize,
        second: usize,
        deviation: f64,
    },
    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("could not split a joint eigenspace of dimension {dimension}")]
    DegenerateSplitFailure { dimension: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear program solver failed: {0}")]
    SolverFailure(String),
    #[error("no perfect matching in the positive support (remaining mass {remaining:.3e})")]
    NoPerfectMatching { remaining: f64 },
    #[error("vector is not majorized: {0}")]
    NotMajorized(String),
    #[error("probability vectors have mismatched lengths")]
    LengthMismatch,
    #[error("no blocks to combine")]
    EmptyBlocks,
    #[error("expected a {expected}x{expected} matrix, got {actual}x{actual}")]
    WrongDimension { expected: usize, actual: usize },
    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),
    #[error("invalid doubly stochastic matrix: {0}")]
    InvalidDoublyStochastic(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid T-transform: {0}")]
    InvalidTTransform(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields are sampled on different spaces")]
    SpaceMismatch,
    #[error("families are not pointwise majorized at {} grid point(s)", points.len())]
    NotPointwiseMajorized { points: Vec<usize> },
    #[error("supplied matrix field is not a witness at grid point {point} (residual {residual:.3e})")]
    NotAWitness { point: usize, residual: f64 },
    #[error("epsilon {epsilon:.3e} is below the certifiable floor {floor:.3e}")]
    EpsilonTooSmall { epsilon: f64, floor: f64 },
    #[error("unknown demo '{0}' (expected prop31, prop33 or cor34)")]
    UnknownDemo(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
