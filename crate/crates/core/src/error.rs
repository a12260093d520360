use thiserror::Error;

/// Every failure the library can report. Variants map onto the documented
/// error names of each operation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is reducible over Q")]
    ReduciblePolynomial,
    #[error("factors of the minimal polynomial cannot be separated at precision {0}")]
    PrecisionTooLow(u32),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("computation exceeds budget: {0}")]
    OutOfBudget(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("no Hecke combination splits the cuspidal subspace: {0}")]
    SplittingFailure(String),
    #[error("weight-2 reduction needs k-2 divisible by p-1 (g = {g}, p = {p})")]
    WeightNotCongruent { g: u32, p: u64 },
    #[error("eigenform is not ordinary at p")]
    NotOrdinary,
    #[error("no consistent embedding of residue fields aligns the checked eigenvalues")]
    EmbeddingAmbiguity,
    #[error("target not in span of the degeneracy images (span dimension {span_dim})")]
    NotInSpan { span_dim: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache entry corrupt: {0}")]
    CacheCorrupt(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
