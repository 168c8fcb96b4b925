use std::fmt::{Debug, Display};

use crate::rootext::RootExtElement;
use crate::var::Var;
use crate::{FieldError, RationalFunction, Rational};

/// Exact field operations shared by matrix entries.
pub trait Scalar: Clone + Debug + Display + PartialEq + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Result<Self, FieldError>;
    fn from_rf(value: RationalFunction) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn differentiate(&self, v: Var) -> Self;
}

impl Scalar for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn one() -> Self {
        RationalFunction::one()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, FieldError> {
        RationalFunction::inv(self)
    }
    fn from_rf(value: RationalFunction) -> Self {
        value
    }
    fn scale(&self, c: &Rational) -> Self {
        RationalFunction::scale(self, c)
    }
    fn differentiate(&self, v: Var) -> Self {
        RationalFunction::differentiate(self, v)
    }
}

impl Scalar for RootExtElement {
    fn zero() -> Self {
        RootExtElement::zero()
    }
    fn one() -> Self {
        RootExtElement::one()
    }
    fn is_zero(&self) -> bool {
        RootExtElement::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Result<Self, FieldError> {
        RootExtElement::inv(self)
    }
    fn from_rf(value: RationalFunction) -> Self {
        RootExtElement::from_rational(value)
    }
    fn scale(&self, c: &Rational) -> Self {
        RootExtElement::scale(self, c)
    }
    fn differentiate(&self, v: Var) -> Self {
        RootExtElement::differentiate(self, v)
    }
}
