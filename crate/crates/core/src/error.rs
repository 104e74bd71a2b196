use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible basis index: {0}")]
    InadmissibleIndex(String),
    #[error("point {0:?} lies outside the domain")]
    OutsideDomain(Vec<f64>),
    #[error("level {level} exceeds the enumerable bound {max}")]
    LevelTooDeep { level: i32, max: i32 },
    #[error("quadrature level {quad} too coarse for level {level} (need at least {needed})")]
    QuadratureTooCoarse { quad: u32, level: u32, needed: u32 },
    #[error("basis family mismatch: expected {expected}, found {found}")]
    FamilyMismatch { expected: String, found: String },
    #[error("coefficient field is empty")]
    EmptyField,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero eigenvalue at index {0} carries a nonzero coefficient")]
    ZeroEigenvalue(usize),
    #[error("kernel matrix is not symmetric (max deviation {0:e})")]
    AsymmetricKernel(f64),
    #[error("eigensolver did not converge")]
    EigenSolveFailed,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown system preset: {0}")]
    UnknownSystem(String),
    #[error("operation not supported for this system kind: {0}")]
    UnsupportedSystem(String),
    #[error("measure is not a probability measure: {0}")]
    NotProbability(String),
    #[error("cell {0} has zero reference mass")]
    EmptyCell(usize),
    #[error("sample set is empty")]
    EmptySamples,
    #[error("nonpositive error value {0} cannot be fitted on a log scale")]
    NonpositiveError(f64),
    #[error("need at least {needed} rows for a rate fit, found {found}")]
    TooFewRows { needed: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
