//! Exact scalars over `Q` and real quadratic fields `Q(sqrt D)`.
//!
//! Every geometric predicate in this crate is decided with these types. There
//! is no floating point on any decision path; `to_f64` exists only for drawing.

mod quad;
mod vec;

pub use quad::{parse_rational, squarefree_kernel, QuadElem};
pub use vec::PlanarVec;

use num_bigint::BigInt;
use thiserror::Error;

/// Reduced fraction with positive denominator (canonical zero is `0/1`).
pub type Rational = num_rational::BigRational;

/// Convenience constructor for small rationals.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operands live in different quadratic fields (D = {0} and D = {1})")]
    MismatchedField(u64, u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse number `{0}`")]
    Parse(String),
}

impl FieldError {
    pub fn code(&self) -> &'static str {
        match self {
            FieldError::MismatchedField(..) => "MismatchedField",
            FieldError::DivisionByZero => "DivisionByZero",
            FieldError::Parse(_) => "ParseError",
        }
    }
}

/// Serializes a [`Rational`] as its `p/q` string.
pub mod rational_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
