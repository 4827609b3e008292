use exactlp::{LpError, Rational};
use thiserror::Error;

use crate::metric::AxiomViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distance matrix is {rows}x{cols} but there are {labels} labels")]
    MatrixShape {
        labels: usize,
        rows: usize,
        cols: usize,
    },
    #[error("a metric space needs at least one point")]
    NoPoints,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("metric axioms violated: {}", format_violations(.0))]
    Axioms(Vec<AxiomViolation>),
    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error("point index {index} out of range for a space with {len} points")]
    PointOutOfRange { index: usize, len: usize },
    #[error("points must be distinct, got {0:?}")]
    NotDistinct(Vec<usize>),
    #[error("operands live on different metric spaces")]
    SpaceMismatch,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(Rational),
    #[error("map does not send the base point to the base point")]
    NotBasePreserving,
    #[error("map table has {found} entries, expected {expected}")]
    MapLength { found: usize, expected: usize },
    #[error("function table must vanish at the base point")]
    NonzeroAtBase,
    #[error("table has {found} entries, expected {expected}")]
    TableLength { found: usize, expected: usize },
    #[error("the pair sets do not partition the ordered pairs")]
    NotAPartition,
    #[error("measure has negative mass at ({0}, {1})")]
    SignedMeasure(usize, usize),
    #[error("t·τ(t) is not increasing: τ-weighted values at {0} and {1}")]
    TauNotIncreasing(Rational, Rational),
    #[error("t·τ(t) is not subadditive at {0} ≤ {1} + {2}")]
    TauNotSubadditive(Rational, Rational, Rational),
    #[error("τ table has no value for distance {0}")]
    TauMissing(Rational),
    #[error("triangle move ({0}, {1}, {2}) does not strictly increase the 1/(1+d) weight")]
    NonStrictMove(usize, usize, usize),
    #[error("molecule ({0}, {1}) is not an extreme point")]
    NotExtreme(usize, usize),
    #[error("invalid dilation: {0}")]
    InvalidDilation(String),
    #[error("operation needs at least two points")]
    TooFewPoints,
    #[error("no strategy named `{0}` is registered")]
    UnknownStrategy(String),
    #[error("a strategy named `{0}` is already registered")]
    DuplicateStrategy(String),
    #[error("linear program: {0}")]
    Lp(#[from] LpError),
    #[error("internal certificate check failed: {0}")]
    Certificate(String),
}

fn format_violations(v: &[AxiomViolation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
