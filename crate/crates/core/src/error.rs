use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("response entry {index} is not valid for the {family} family")]
    InvalidResponse { index: usize, family: &'static str },
    #[error("dispersion must be positive and finite")]
    InvalidDispersion,
    #[error("invalid support: {0}")]
    InvalidSupport(&'static str),
    #[error("support of size {size} exceeds the {rows} available rows")]
    SupportTooLarge { size: usize, rows: usize },
    #[error("design is rank deficient (singular value ratio {ratio:e})")]
    RankDeficient { ratio: f64 },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("criterion needs n >= 2 and p >= 1")]
    InvalidProblemSize,
    #[error("contrast summary is non-finite but not flagged as clamped")]
    NonFiniteContrast,
    #[error("solver did not converge (score sup-norm {score:e})")]
    NotConverged { score: f64 },
    #[error("fit neither converged nor stopped at the separation clamp")]
    NotAdmissible,
    #[error("every candidate was rejected")]
    AllCandidatesRejected,
}
