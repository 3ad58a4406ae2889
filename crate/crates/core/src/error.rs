use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("decision delay {delta} outside 0..={max}")]
    DelayOutOfRange { delta: usize, max: usize },

    #[error("matrix is not positive definite (pivot {index} = {pivot:e})")]
    NotPositiveDefinite { index: usize, pivot: f64 },

    #[error("dictionary {kind} cannot be built from a {found} factorization")]
    IncompatibleFactorization { kind: String, found: String },

    #[error("circulant surrogate needs N_f > 2v (N_f = {n_f}, v = {memory})")]
    CirculantTooShort { n_f: usize, memory: usize },

    #[error("eigensolver did not converge")]
    EigenNoConvergence,

    #[error("column {0} of the dictionary is zero")]
    ZeroColumn(usize),

    #[error("exhaustive search limited to N_f <= {limit}, got {n_f}")]
    SearchTooLarge { n_f: usize, limit: usize },

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
