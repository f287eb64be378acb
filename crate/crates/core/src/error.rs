use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed polynomial document: {0}")]
    Malformed(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("polynomial has no nonzero terms after canonicalization")]
    EmptyPolynomial,

    #[error("frequencies are linearly dependent (rank {rank} of {terms} terms)")]
    NotInClassS { rank: usize, terms: usize },

    #[error("frequencies do not form a basis of Q^{dim} (rank {rank}, {terms} terms)")]
    NotABasis { dim: usize, rank: usize, terms: usize },

    #[error("not a nonconstant eigenfunction on the 2-torus: {0}")]
    NotT2Eigenfunction(String),

    #[error("exact antisymmetry check failed at frequency {nu:?}: nu.u = {dot}")]
    ExactCheckFailed { nu: Vec<i64>, dot: String },

    #[error("reachable frequency sums exceed the bound of {limit} entries")]
    OrderTooLarge { limit: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
