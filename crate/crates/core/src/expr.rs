//! Terse constructors for symbolic expressions.

use pvi_field::{RationalFunction, Var};

pub(crate) type Rf = RationalFunction;

pub(crate) fn v(x: Var) -> Rf {
    Rf::var(x)
}

pub(crate) fn c(n: i64) -> Rf {
    Rf::from_int(n)
}

pub(crate) fn fr(n: i64, d: i64) -> Rf {
    Rf::from_frac(n, d)
}

pub(crate) fn q() -> Rf {
    v(Var::Q)
}

pub(crate) fn p() -> Rf {
    v(Var::P)
}

pub(crate) fn t() -> Rf {
    v(Var::T)
}

