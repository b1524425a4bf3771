use std::path::PathBuf;

/// Errors produced by the approximation pipelines and their supporting routines.
#[derive(Debug, thiserror::Error)]
pub enum NystromError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not positive definite (numerical rank {rank} of {dim})")]
    NotPositiveDefinite { rank: usize, dim: usize },

    #[error("kernel matrix is singular to working tolerance")]
    SingularKernel,

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("data are degenerate: {0}")]
    DegenerateData(String),

    #[error("landmark index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("landmark index {0} selected more than once")]
    DuplicateIndex(usize),

    #[error("requested {requested} items from a population of {available}")]
    TooMany { requested: usize, available: usize },

    #[error("dense {n}x{n} matrix exceeds the configured cap of {cap} rows")]
    DenseCapExceeded { n: usize, cap: usize },

    #[error("index sets are not nested: {0}")]
    NotNested(String),

    #[error("eigendecomposition failed to converge")]
    EigenFailure,

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("{path}: line {line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = NystromError> = std::result::Result<T, E>;
