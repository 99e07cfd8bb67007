//! Exact truncated power series over the rationals.

mod divide;
mod exponent;
mod form;
mod jet;
mod series;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

pub use divide::{divide, DivideError};
pub use exponent::{monomials_in_range, monomials_of_degree, Exponent};
pub use form::{wedge_coefficient, FormJet};
pub use jet::{BeyondReliable, Jet};
pub use series::{compose, implicit_solve, invert_map, linear_part, sqrt_unit, unit_inverse, Substitution};

pub type Rational = BigRational;

/// Default truncation order.
pub const DEFAULT_ORDER: u32 = 12;

/// Shorthand for the rational `n/d`.
pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("at most 7 variables are supported, got {0}")]
    TooManyVariables(usize),
    #[error("total degree {0} exceeds 255")]
    DegreeOverflow(u32),
    #[error("exponent has {found} entries, expected {expected}")]
    ExponentLength { expected: usize, found: usize },
    #[error("jets live in different spaces: (nvars, order) {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, u32),
        right: (usize, u32),
    },
    #[error("substituted jet {index} has a nonzero constant term")]
    NonzeroConstantTerm { index: usize },
    #[error("expected {expected} jets, got {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("linear part is not invertible")]
    SingularLinearPart,
    #[error("operation needs {expected} variables, got {found}")]
    WrongVariableCount { expected: usize, found: usize },
    #[error("value at the origin is not a rational square or not reliable")]
    NotASquare,
}
