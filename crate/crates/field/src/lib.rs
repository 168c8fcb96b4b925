//! Exact arithmetic in the rational function field
//! `Q(a1, a2, a3, a4, q, p, t, z, x)` and its finite square-root extensions.
//!
//! Elements are kept in canonical reduced form so that structural equality
//! decides mathematical equality.

mod gcd;
mod modgcd;
mod monomial;
mod poly;
mod ratfunc;
mod rootext;
mod scalar;
mod var;

pub use gcd::{gcd, gcd_many, lcm, primitive_part};
pub use monomial::Monomial;
pub use poly::Polynomial;
pub use ratfunc::{Point, RationalFunction, Substitution, POLE_TOLERANCE};
pub use rootext::{RootExtElement, RootSymbol, RootSystem, MAX_ROOTS};
pub use scalar::Scalar;
pub use var::{Var, NVARS};

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("no value supplied for {0}")]
    MissingValue(String),
    #[error("evaluation hit a pole")]
    Pole,
    #[error("branch value inconsistent with radicand: {0}")]
    InconsistentBranch(String),
    #[error("operands live in different root extensions")]
    IncompatibleRoots,
    #[error("unknown root symbol `{0}`")]
    UnknownRoot(String),
    #[error("radicand of `{0}` is zero")]
    ZeroRadicand(String),
    #[error("at most {max} roots supported, got {0}", max = MAX_ROOTS)]
    TooManyRoots(usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Shorthand for a rational constant `n / d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
