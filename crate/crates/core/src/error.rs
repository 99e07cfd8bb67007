use thiserror::Error;

use crate::jetcalc::{DivideError, JetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Divide(#[from] DivideError),
    #[error("source dimension {n} exceeds target dimension {m}")]
    DimensionOrder { n: usize, m: usize },
    #[error("a map-germ needs at least one component")]
    NoComponents,
    #[error("component {index} does not vanish at the origin")]
    NonzeroConstant { index: usize },
    #[error("index set {0:?} is not an n-subset of the target indices")]
    BadIndexSet(Vec<usize>),
    #[error("germ has corank {0}, expected corank 1")]
    Corank(usize),
    #[error("germ is not a proper frontal ({0})")]
    NotProperFrontal(String),
    #[error("recognition needs a surface germ (n = 2), got n = {0}")]
    SourceDimension(usize),
    #[error("unknown normal form tag {0:?}")]
    UnknownNormalForm(String),
    #[error("invalid curve type: {0}")]
    InvalidCurveType(String),
    #[error("{0}")]
    Precondition(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;
