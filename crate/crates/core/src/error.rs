//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::data::ScaleMarker;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },

    #[error("missing value on {date} in column {column}")]
    MissingCell { date: String, column: String },

    #[error("non-positive price {value} on {date} in column {column}")]
    NonPositivePrice {
        date: String,
        column: String,
        value: f64,
    },

    #[error("duplicate date {0}")]
    DuplicateDate(String),

    #[error("dates not increasing: {previous} followed by {next}")]
    UnorderedDates { previous: String, next: String },

    #[error("unparseable row at line {line}: {reason}")]
    UnparseableRow { line: usize, reason: String },

    #[error("wrong scale: expected {expected:?}, found {found:?}")]
    WrongScale {
        expected: ScaleMarker,
        found: ScaleMarker,
    },

    #[error("panels share no dates")]
    EmptyIntersection,

    #[error("eigenfunctions are not orthonormal on the grid: |<phi_{i}, phi_{j}> - delta| = {deviation:e}")]
    NonOrthonormalSpec { i: usize, j: usize, deviation: f64 },

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("all eigenvalues are zero")]
    AllZeroEigenvalues,

    #[error("eigenvalue {0:e} is materially negative")]
    NegativeEigenvalue(f64),

    #[error("grid mismatch: model has {expected} nodes, panel has {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("inadmissible damped-trend parameters: {0}")]
    InadmissibleParams(String),

    #[error("not enough observations: need at least {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("singular design matrix (reciprocal condition {rcond:e})")]
    SingularDesign { rcond: f64 },

    #[error("zero MASE denominator for tenor {tenor}")]
    ZeroDenominator { tenor: String },

    #[error("forecast coverage mismatch: {0}")]
    CoverageMismatch(String),

    #[error("loss differential has zero long-run variance but non-zero mean")]
    ZeroVariance,

    #[error("invalid bootstrap plan: {0}")]
    InvalidPlan(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("model {model} failed for target {date}: {source}")]
    WindowFailure {
        model: String,
        date: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
