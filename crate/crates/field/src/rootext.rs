//! Rational functions with adjoined square roots.
//!
//! An element is stored in multilinear normal form: one rational-function
//! coefficient per subset of the declared root symbols, each symbol appearing
//! with exponent 0 or 1. Products reduce `r^2` to its declared value. The
//! declared radicands must be multiplicatively independent modulo squares for
//! the normal form to be canonical; callers adjoin only the roots a
//! computation needs.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::ratfunc::{Point, RationalFunction};
use crate::var::Var;
use crate::{FieldError, Rational};

/// At most this many symbols per root system (`2^n` components per element).
pub const MAX_ROOTS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootSymbol {
    pub name: String,
    pub square: RationalFunction,
}

/// The set of square roots adjoined for one computation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootSystem {
    symbols: Vec<RootSymbol>,
}

impl RootSystem {
    pub fn empty() -> Arc<Self> {
        Arc::new(RootSystem::default())
    }

    /// Declares roots `name_i = sqrt(square_i)`.
    pub fn new(
        symbols: impl IntoIterator<Item = (impl Into<String>, RationalFunction)>,
    ) -> Result<Arc<Self>, FieldError> {
        let symbols: Vec<RootSymbol> = symbols
            .into_iter()
            .map(|(name, square)| RootSymbol {
                name: name.into(),
                square,
            })
            .collect();
        if symbols.len() > MAX_ROOTS {
            return Err(FieldError::TooManyRoots(symbols.len()));
        }
        if let Some(s) = symbols.iter().find(|s| s.square.is_zero()) {
            return Err(FieldError::ZeroRadicand(s.name.clone()));
        }
        Ok(Arc::new(RootSystem { symbols }))
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[RootSymbol] {
        &self.symbols
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    fn components(&self) -> usize {
        1 << self.symbols.len()
    }

    /// Product of the radicands of the roots in `mask`.
    fn square_of(&self, mask: usize) -> RationalFunction {
        let mut acc = RationalFunction::one();
        for (i, s) in self.symbols.iter().enumerate() {
            if mask & (1 << i) != 0 {
                acc = &acc * &s.square;
            }
        }
        acc
    }
}

#[derive(Clone, Debug)]
pub struct RootExtElement {
    sys: Arc<RootSystem>,
    comps: Vec<RationalFunction>,
}

impl PartialEq for RootExtElement {
    fn eq(&self, other: &Self) -> bool {
        match unify(self, other) {
            Ok((a, b)) => a.comps == b.comps,
            Err(_) => false,
        }
    }
}

impl Eq for RootExtElement {}

fn same_system(a: &Arc<RootSystem>, b: &Arc<RootSystem>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Brings two elements into one root system. Purely rational elements adapt
/// to the other operand's system.
fn unify(
    a: &RootExtElement,
    b: &RootExtElement,
) -> Result<(RootExtElement, RootExtElement), FieldError> {
    if same_system(&a.sys, &b.sys) {
        return Ok((a.clone(), b.clone()));
    }
    if b.is_rational() {
        return Ok((a.clone(), RootExtElement::rational_in(&a.sys, b.comps[0].clone())));
    }
    if a.is_rational() {
        return Ok((RootExtElement::rational_in(&b.sys, a.comps[0].clone()), b.clone()));
    }
    Err(FieldError::IncompatibleRoots)
}

impl RootExtElement {
    pub fn rational_in(sys: &Arc<RootSystem>, value: RationalFunction) -> Self {
        let mut comps = vec![RationalFunction::zero(); sys.components()];
        comps[0] = value;
        RootExtElement {
            sys: sys.clone(),
            comps,
        }
    }

    pub fn from_rational(value: RationalFunction) -> Self {
        Self::rational_in(&RootSystem::empty(), value)
    }

    pub fn zero() -> Self {
        Self::from_rational(RationalFunction::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(RationalFunction::one())
    }

    /// The root symbol `name` of `sys`.
    pub fn root(sys: &Arc<RootSystem>, name: &str) -> Result<Self, FieldError> {
        let i = sys
            .index_of(name)
            .ok_or_else(|| FieldError::UnknownRoot(name.to_string()))?;
        let mut comps = vec![RationalFunction::zero(); sys.components()];
        comps[1 << i] = RationalFunction::one();
        Ok(RootExtElement {
            sys: sys.clone(),
            comps,
        })
    }

    pub fn system(&self) -> &Arc<RootSystem> {
        &self.sys
    }

    /// Coefficient of the product of roots in `mask`.
    pub fn component(&self, mask: usize) -> &RationalFunction {
        &self.comps[mask]
    }

    pub fn components(&self) -> &[RationalFunction] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(RationalFunction::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.comps.iter().skip(1).all(RationalFunction::is_zero)
    }

    pub fn as_rational(&self) -> Option<&RationalFunction> {
        self.is_rational().then(|| &self.comps[0])
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RootExtElement {
            sys: self.sys.clone(),
            comps: self.comps.iter().map(|x| x.scale(c)).collect(),
        }
    }

    pub fn mul_rational(&self, c: &RationalFunction) -> Self {
        RootExtElement {
            sys: self.sys.clone(),
            comps: self.comps.iter().map(|x| x * c).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = unify(self, other)?;
        Ok(RootExtElement {
            sys: a.sys.clone(),
            comps: a.comps.iter().zip(b.comps.iter()).map(|(x, y)| x + y).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, FieldError> {
        let (a, b) = unify(self, other)?;
        Ok(RootExtElement {
            sys: a.sys.clone(),
            comps: a.comps.iter().zip(b.comps.iter()).map(|(x, y)| x - y).collect(),
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, FieldError> {
        if self.is_rational() {
            return Ok(other.mul_rational(&self.comps[0]));
        }
        if other.is_rational() {
            return Ok(self.mul_rational(&other.comps[0]));
        }
        let (a, b) = unify(self, other)?;
        let n = a.comps.len();
        let mut comps = vec![RationalFunction::zero(); n];
        for (i, x) in a.comps.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.comps.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let mut term = x * y;
                let shared = i & j;
                if shared != 0 {
                    term = &term * &a.sys.square_of(shared);
                }
                comps[i ^ j] = &comps[i ^ j] + &term;
            }
        }
        Ok(RootExtElement {
            sys: a.sys.clone(),
            comps,
        })
    }

    /// `x -> x` with the sign of root `i` flipped.
    fn conjugate(&self, i: usize) -> Self {
        RootExtElement {
            sys: self.sys.clone(),
            comps: self
                .comps
                .iter()
                .enumerate()
                .map(|(mask, c)| if mask & (1 << i) != 0 { -c } else { c.clone() })
                .collect(),
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // Multiply by conjugates until the norm is rational.
        let mut num = RootExtElement::rational_in(&self.sys, RationalFunction::one());
        let mut den = self.clone();
        for i in 0..self.sys.len() {
            let c = den.conjugate(i);
            den = den.try_mul(&c)?;
            num = num.try_mul(&c)?;
        }
        let norm = den.as_rational().ok_or(FieldError::IncompatibleRoots)?;
        // A zero norm means the radicands were not independent.
        let inv = norm.inv()?;
        Ok(num.mul_rational(&inv))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        self.try_mul(&other.inv()?)
    }

    /// Partial derivative; `d r = (d r^2) / (2 r^2) * r` for each root `r`.
    pub fn differentiate(&self, v: Var) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let log_derivs: Vec<RationalFunction> = self
            .sys
            .symbols
            .iter()
            .map(|s| {
                (&s.square.differentiate(v) / &s.square).scale(&half)
            })
            .collect();
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                if c.is_zero() {
                    return RationalFunction::zero();
                }
                let mut d = c.differentiate(v);
                for (i, ld) in log_derivs.iter().enumerate() {
                    if mask & (1 << i) != 0 && !ld.is_zero() {
                        d = &d + &(c * ld);
                    }
                }
                d
            })
            .collect();
        RootExtElement {
            sys: self.sys.clone(),
            comps,
        }
    }

    /// Evaluates with explicit branch values for the roots, in declaration order.
    pub fn eval_complex(&self, point: &Point, branches: &[Complex64]) -> Result<Complex64, FieldError> {
        if branches.len() != self.sys.len() {
            return Err(FieldError::InconsistentBranch(format!(
                "expected {} branch values, got {}",
                self.sys.len(),
                branches.len()
            )));
        }
        for (s, b) in self.sys.symbols.iter().zip(branches.iter()) {
            let sq = s.square.eval_complex(point)?;
            let tol = 1e-9 * sq.norm().max(1.0);
            if (b * b - sq).norm() > tol {
                return Err(FieldError::InconsistentBranch(s.name.clone()));
            }
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (mask, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut value = c.eval_complex(point)?;
            for (i, b) in branches.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    value *= b;
                }
            }
            total += value;
        }
        if !total.is_finite() {
            return Err(FieldError::Pole);
        }
        
        Ok(total)
    }

    /// Principal-branch values of the roots at `point`.
    pub fn principal_branches(&self, point: &Point) -> Result<Vec<Complex64>, FieldError> {
        self.sys
            .symbols
            .iter()
            .map(|s| Ok(s.square.eval_complex(point)?.sqrt()))
            .collect()
    }
}

impl<'a> Add<&'a RootExtElement> for &'a RootExtElement {
    type Output = RootExtElement;
    fn add(self, rhs: &'a RootExtElement) -> RootExtElement {
        self.try_add(rhs).expect("compatible root systems")
    }
}

impl<'a> Sub<&'a RootExtElement> for &'a RootExtElement {
    type Output = RootExtElement;
    fn sub(self, rhs: &'a RootExtElement) -> RootExtElement {
        self.try_sub(rhs).expect("compatible root systems")
    }
}

impl<'a> Mul<&'a RootExtElement> for &'a RootExtElement {
    type Output = RootExtElement;
    fn mul(self, rhs: &'a RootExtElement) -> RootExtElement {
        self.try_mul(rhs).expect("compatible root systems")
    }
}

impl Neg for &RootExtElement {
    type Output = RootExtElement;
    fn neg(self) -> RootExtElement {
        RootExtElement {
            sys: self.sys.clone(),
            comps: self.comps.iter().map(|c| -c).collect(),
        }
    }
}

impl From<RationalFunction> for RootExtElement {
    fn from(value: RationalFunction) -> Self {
        Self::from_rational(value)
    }
}

impl fmt::Display for RootExtElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (mask, c) in self.comps.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let roots: Vec<String> = self
                .sys
                .symbols
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.name.clone())
                .collect();
            if roots.is_empty() {
                parts.push(c.to_string());
            } else if c.is_one() {
                parts.push(roots.join("*"));
            } else {
                parts.push(format!("({})*{}", c, roots.join("*")));
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl Zero for RootExtElement {
    fn zero() -> Self {
        RootExtElement::zero()
    }
    fn is_zero(&self) -> bool {
        RootExtElement::is_zero(self)
    }
}

impl Add for RootExtElement {
    type Output = RootExtElement;
    fn add(self, rhs: RootExtElement) -> RootExtElement {
        &self + &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t() -> RationalFunction {
        RationalFunction::var(Var::T)
    }

    fn s_system() -> Arc<RootSystem> {
        let sq = &t() * &(&t() - &RationalFunction::one());
        RootSystem::new([("s", sq)]).unwrap()
    }

    #[test]
    fn root_squares_to_radicand() {
        let sys = s_system();
        let s = RootExtElement::root(&sys, "s").unwrap();
        let sq = &s * &s;
        let expected = &(&t() * &t()) - &t();
        assert_eq!(sq.as_rational(), Some(&expected));
    }

    #[test]
    fn inverse_of_binomial() {
        let sys = s_system();
        let s = RootExtElement::root(&sys, "s").unwrap();
        let x = &s + &RootExtElement::rational_in(&sys, RationalFunction::var(Var::Q));
        let inv = x.inv().unwrap();
        let one = &x * &inv;
        assert_eq!(one.as_rational(), Some(&RationalFunction::one()));
    }

    #[test]
    fn derivative_of_sqrt_t_t_minus_1() {
        let sys = s_system();
        let s = RootExtElement::root(&sys, "s").unwrap();
        let ds = s.differentiate(Var::T);
        // (2t - 1) s / (2 t (t - 1))
        let coeff = &(&(&RationalFunction::from_int(2) * &t()) - &RationalFunction::one())
            / &(&RationalFunction::from_int(2) * &(&t() * &(&t() - &RationalFunction::one())));
        assert!(ds.component(0).is_zero());
        assert_eq!(ds.component(1), &coeff);
    }

    #[test]
    fn derivative_of_sqrt_z() {
        let z = RationalFunction::var(Var::Z);
        let sys = RootSystem::new([("w", z.clone())]).unwrap();
        let w = RootExtElement::root(&sys, "w").unwrap();
        let dw = w.differentiate(Var::Z);
        assert_eq!(dw.component(1), &(&RationalFunction::one() / &(&RationalFunction::from_int(2) * &z)));
    }

    #[test]
    fn branch_evaluation() {
        let sys = s_system();
        let s = RootExtElement::root(&sys, "s").unwrap();
        let pt = Point::new().with(Var::T, Complex64::new(2.0, 0.0));
        let v = s
            .eval_complex(&pt, &[Complex64::new(2f64.sqrt(), 0.0)])
            .unwrap();
        assert!((v.re - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert!(matches!(
            s.eval_complex(&pt, &[Complex64::new(1.0, 0.0)]),
            Err(FieldError::InconsistentBranch(_))
        ));
    }

    #[test]
    fn rational_elements_adapt_to_any_system() {
        let sys = s_system();
        let s = RootExtElement::root(&sys, "s").unwrap();
        let two = RootExtElement::from_rational(RationalFunction::from_int(2));
        let sum = &s + &two;
        assert_eq!(sum.component(0), &RationalFunction::from_int(2));
        let other = RootSystem::new([("u", -&t())]).unwrap();
        let u = RootExtElement::root(&other, "u").unwrap();
        assert_eq!(s.try_add(&u), Err(FieldError::IncompatibleRoots));
    }
}
