use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotCoprime: polynomials share a nontrivial common factor")]
    NotCoprime,
    #[error("DegenerateCone: rays are linearly dependent")]
    DegenerateCone,
    #[error("NonPrimitiveRay: ({0}, {1}) is not primitive")]
    NonPrimitiveRay(i64, i64),
    #[error("InvalidSingularity: {0}")]
    InvalidSingularity(String),
    #[error("NotResidual: {0} is not a residual singularity")]
    NotResidual(String),
    #[error("LocalIndexMismatch: {0} vs {1}")]
    LocalIndexMismatch(u64, u64),
    #[error("InvalidWeight: gcd({r}, {a}) != 1")]
    InvalidWeight { r: u64, a: i64 },
    #[error("InvalidFraction: {0}/{1}")]
    InvalidFraction(i64, i64),
    #[error("UnsupportedIndex: local index {0} has no residual singularities")]
    UnsupportedIndex(u64),
    #[error("MixedIndex: expected local index {expected}, found {found}")]
    MixedIndex { expected: u64, found: u64 },
    #[error("LengthMismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("NotASurfaceSeries: {0}")]
    NotASurfaceSeries(String),
    #[error("AmbiguousDecomposition: local indices {0:?} admit several decompositions")]
    AmbiguousDecomposition(Vec<u64>),
    #[error("NonIntegralDelta: local index {0} has a non-integral delta-vector")]
    NonIntegralDelta(u64),
    #[error("NotRealizable: delta-vector is not in the delta-lattice at local index {0}")]
    NotRealizable(u64),
    #[error("CapacityExceeded: {what} (reached {attained})")]
    CapacityExceeded { what: String, attained: u64 },
    #[error("Infeasible: no positive degree (12 - A - nMin = {0})")]
    Infeasible(String),
    #[error("KernelRank: isomorphism-level kernel at local index {ell} has rank {rank}, expected 1")]
    KernelRank { ell: u64, rank: usize },
    #[error("Parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
