//! Reduced quotients of polynomials.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::gcd::gcd;
use crate::poly::Polynomial;
use crate::var::{Var, NVARS};
use crate::{FieldError, Rational};

/// Element of `Q(a1, a2, a3, a4, q, p, t, z, x)` in canonical form.
///
/// Numerator and denominator are coprime and the denominator's grlex leading
/// coefficient is one, so `==` decides equality of rational functions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

/// Simultaneous substitution `v -> image`; variables without an image are kept.
#[derive(Clone, Debug, Default)]
pub struct Substitution {
    images: [Option<RationalFunction>; NVARS],
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, image: RationalFunction) -> Self {
        self.images[v.index()] = Some(image);
        self
    }

    pub fn set(&mut self, v: Var, image: RationalFunction) {
        self.images[v.index()] = Some(image);
    }

    pub fn get(&self, v: Var) -> Option<&RationalFunction> {
        self.images[v.index()].as_ref()
    }

    /// Image of `v`, defaulting to `v` itself.
    pub fn image(&self, v: Var) -> RationalFunction {
        self.get(v).cloned().unwrap_or_else(|| RationalFunction::var(v))
    }
}

/// Complex evaluation point; unset variables are an error if they occur.
#[derive(Clone, Debug, Default)]
pub struct Point {
    values: [Option<Complex64>; NVARS],
}

impl Point {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, v: Var, value: Complex64) -> Self {
        self.values[v.index()] = Some(value);
        self
    }

    pub fn set(&mut self, v: Var, value: Complex64) {
        self.values[v.index()] = Some(value);
    }

    pub fn get(&self, v: Var) -> Option<Complex64> {
        self.values[v.index()]
    }

    fn resolve(&self, support: u16) -> Result<[Complex64; NVARS], FieldError> {
        let mut out = [Complex64::new(0.0, 0.0); NVARS];
        for (i, slot) in out.iter_mut().enumerate() {
            if support & (1 << i) != 0 {
                *slot = self.values[i]
                    .ok_or_else(|| FieldError::MissingValue(Var::from_index(i).name().into()))?;
            }
        }
        Ok(out)
    }
}

/// Relative size below which an evaluated denominator counts as a pole.
pub const POLE_TOLERANCE: f64 = 1e-13;

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction {
            num: Polynomial::zero(),
            den: Polynomial::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_poly(Polynomial::one())
    }

    pub fn from_poly(p: Polynomial) -> Self {
        RationalFunction {
            num: p,
            den: Polynomial::one(),
        }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_poly(Polynomial::from_int(n))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Self::constant(Rational::new(n.into(), d.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::from_poly(Polynomial::var(v))
    }

    /// Reduces `num / den` to canonical form.
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Polynomial, den: Polynomial) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalized(num, den)
    }

    /// Assumes coprime input; fixes the denominator's leading coefficient.
    fn normalized(num: Polynomial, den: Polynomial) -> Self {
        let lc = den.leading_coeff();
        if lc.is_one() {
            RationalFunction { num, den }
        } else {
            let inv = lc.recip();
            RationalFunction {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn numer(&self) -> &Polynomial {
        &self.num
    }

    pub fn denom(&self) -> &Polynomial {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        self.den.is_one().then_some(&self.num)
    }

    /// Bitmask of variables occurring in numerator or denominator.
    pub fn support(&self) -> u16 {
        self.num.support() | self.den.support()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.support() & (1 << v.index()) != 0
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self, FieldError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Self, FieldError> {
        if e < 0 {
            return self.inv()?.pow(-e);
        }
        let e = e as u32;
        Ok(Self::normalized(self.num.pow(e), self.den.pow(e)))
    }

    pub fn differentiate(&self, v: Var) -> Self {
        if !self.contains_var(v) {
            return Self::zero();
        }
        if self.den.is_one() {
            return Self::from_poly(self.num.differentiate(v));
        }
        let dn = self.num.differentiate(v);
        let dd = self.den.differentiate(v);
        // (n/d)' = (n' d - n d') / d^2; cancel against d first.
        let g = gcd(&self.den, &dd);
        let d_red = self.den.div_exact(&g).expect("gcd divides");
        let dd_red = dd.div_exact(&g).expect("gcd divides");
        let num = &(&dn * &d_red) - &(&self.num * &dd_red);
        let den = &self.den * &d_red;
        Self::reduce(num, den)
    }

    /// Simultaneous substitution of rational-function images.
    pub fn substitute(&self, sub: &Substitution) -> Result<Self, FieldError> {
        let support = self.support();
        let active: Vec<usize> = (0..NVARS)
            .filter(|&i| support & (1 << i) != 0 && sub.images[i].is_some())
            .collect();
        if active.is_empty() {
            return Ok(self.clone());
        }
        if self.num.len() + self.den.len() <= HORNER_TERMS {
            let num = horner(&self.num, sub, &active);
            let den = horner(&self.den, sub, &active);
            return num.checked_div(&den);
        }
        // Homogenize: P(n/d) = [sum c prod n^e d^(deg - e)] / prod d^deg.
        let nd = self.num.degrees();
        let dd = self.den.degrees();
        let pn = compose_homogenized(&self.num, sub, &active, &nd);
        let qn = compose_homogenized(&self.den, sub, &active, &dd);
        if qn.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        // The two homogenizing denominators differ by powers of the image
        // denominators only.
        let mut num = pn;
        let mut den = qn;
        for &i in &active {
            let img = sub.images[i].as_ref().expect("active image");
            if img.den.is_one() {
                continue;
            }
            let (a, b) = (nd[i] as i64, dd[i] as i64);
            if b > a {
                num = &num * &img.den.pow((b - a) as u32);
            } else if a > b {
                den = &den * &img.den.pow((a - b) as u32);
            }
        }
        Ok(Self::reduce(num, den))
    }

    pub fn eval_complex(&self, point: &Point) -> Result<Complex64, FieldError> {
        let values = point.resolve(self.support())?;
        let d = self.den.eval_complex(&values);
        let scale = self.den.eval_magnitude(&values);
        if d.norm() <= POLE_TOLERANCE * scale.max(f64::MIN_POSITIVE) || d.norm() == 0.0 {
            return Err(FieldError::Pole);
        }
        Ok(self.num.eval_complex(&values) / d)
    }

    /// Exact evaluation when every occurring variable gets a rational value.
    pub fn eval_rational(&self, values: &[(Var, Rational)]) -> Result<Rational, FieldError> {
        let mut sub = Substitution::new();
        for (v, c) in values {
            sub.set(*v, RationalFunction::constant(c.clone()));
        }
        let r = self.substitute(&sub)?;
        r.as_constant().ok_or_else(|| {
            FieldError::MissingValue(
                (0..NVARS)
                    .filter(|i| r.support() & (1 << i) != 0)
                    .map(|i| Var::from_index(i).name())
                    .collect::<Vec<_>>()
                    .join(","),
            )
        })
    }

    fn add_impl(&self, other: &Self, negate: bool) -> Self {
        let rhs_num = if negate { -&other.num } else { other.num.clone() };
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return RationalFunction {
                num: rhs_num,
                den: other.den.clone(),
            };
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_poly(&self.num + &rhs_num);
            }
            return Self::reduce(&self.num + &rhs_num, self.den.clone());
        }
        if self.den.is_one() {
            // Coprime denominators: no cancellation possible.
            let num = &(&self.num * &other.den) + &rhs_num;
            return Self::normalized(num, other.den.clone());
        }
        if other.den.is_one() {
            let num = &self.num + &(&rhs_num * &self.den);
            return Self::normalized(num, self.den.clone());
        }
        let g = gcd(&self.den, &other.den);
        if g.is_one() {
            let num = &(&self.num * &other.den) + &(&rhs_num * &self.den);
            return Self::normalized(num, &self.den * &other.den);
        }
        let e1 = self.den.div_exact(&g).expect("gcd divides");
        let e2 = other.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &e2) + &(&rhs_num * &e1);
        if num.is_zero() {
            return Self::zero();
        }
        let den = &(&e1 * &e2) * &g;
        // Only factors of g can cancel.
        let h = gcd(&num, &g);
        if h.is_one() {
            Self::normalized(num, den)
        } else {
            Self::reduce(num, den)
        }
    }

    fn mul_impl(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && other.den.is_one() {
            return Self::from_poly(&self.num * &other.num);
        }
        // Cross-cancel; the result of reduced inputs stays reduced.
        let g1 = gcd(&self.num, &other.den);
        let g2 = gcd(&other.num, &self.den);
        let (n1, d2) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (
                self.num.div_exact(&g1).expect("gcd divides"),
                other.den.div_exact(&g1).expect("gcd divides"),
            )
        };
        let (n2, d1) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (
                other.num.div_exact(&g2).expect("gcd divides"),
                self.den.div_exact(&g2).expect("gcd divides"),
            )
        };
        Self::normalized(&n1 * &n2, &d1 * &d2)
    }
}

/// Short expressions are substituted by nested Horner evaluation in the
/// field, which keeps intermediate denominators small.
const HORNER_TERMS: usize = 64;

fn horner(p: &Polynomial, sub: &Substitution, active: &[usize]) -> RationalFunction {
    let Some((&first, rest)) = active.split_first() else {
        return RationalFunction::from_poly(p.clone());
    };
    let v = Var::from_index(first);
    if !p.contains_var(v) {
        return horner(p, sub, rest);
    }
    let x = sub.images[first].as_ref().expect("active image");
    let coeffs = p.coefficients_in(v);
    let mut acc = RationalFunction::zero();
    for c in coeffs.iter().rev() {
        acc = &acc * x;
        if !c.is_zero() {
            acc = &acc + &horner(c, sub, rest);
        }
    }
    acc
}

/// Numerator of `p(images)` after multiplying by `prod d_i^deg_i`.
fn compose_homogenized(
    p: &Polynomial,
    sub: &Substitution,
    active: &[usize],
    degs: &[u16; NVARS],
) -> Polynomial {
    let mut num_images: [Option<Polynomial>; NVARS] = Default::default();
    // Each term c * v^e becomes c * n^e * d^(deg - e); expand by hand.
    let mut cache_n: Vec<Vec<Polynomial>> = vec![Vec::new(); NVARS];
    let mut cache_d: Vec<Vec<Polynomial>> = vec![Vec::new(); NVARS];
    for &i in active {
        let img = sub.images[i].as_ref().expect("active image");
        let deg = degs[i] as usize;
        let mut pn = vec![Polynomial::one()];
        let mut pd = vec![Polynomial::one()];
        for k in 1..=deg {
            let a = &pn[k - 1] * &img.num;
            pn.push(a);
            if !img.den.is_one() {
                let b = &pd[k - 1] * &img.den;
                pd.push(b);
            }
        }
        cache_n[i] = pn;
        cache_d[i] = pd;
        num_images[i] = Some(img.num.clone());
    }
    let mut acc: Vec<(crate::Monomial, Rational)> = Vec::new();
    for (m, c) in p.terms() {
        let mut kept = crate::Monomial::ONE;
        let mut factor = Polynomial::constant(c.clone());
        for (i, &e) in m.exps().iter().enumerate() {
            if num_images[i].is_some() {
                factor = &factor * &cache_n[i][e as usize];
                let d = &cache_d[i];
                if d.len() > 1 {
                    factor = &factor * &d[degs[i] as usize - e as usize];
                }
            } else if e > 0 {
                kept = kept.with_exp(Var::from_index(i), e);
            }
        }
        acc.extend(factor.mul_monomial(&kept).terms().iter().cloned());
    }
    Polynomial::from_terms(acc)
}

impl<'a> Add<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &'a RationalFunction) -> RationalFunction {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &'a RationalFunction) -> RationalFunction {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &'a RationalFunction) -> RationalFunction {
        self.mul_impl(rhs)
    }
}

/// Panics on division by zero; use [`RationalFunction::checked_div`] otherwise.
impl<'a> Div<&'a RationalFunction> for &'a RationalFunction {
    type Output = RationalFunction;
    fn div(self, rhs: &'a RationalFunction) -> RationalFunction {
        self.checked_div(rhs).expect("division by zero rational function")
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a RationalFunction> for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: &'a RationalFunction) -> RationalFunction {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<RationalFunction> for &'a RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                self.$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        Self::from_poly(p)
    }
}

impl From<Var> for RationalFunction {
    fn from(v: Var) -> Self {
        Self::var(v)
    }
}

impl From<i64> for RationalFunction {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<Rational> for RationalFunction {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = if self.num.len() > 1 || !self.num.terms()[0].1.is_integer() {
            format!("({})", self.num)
        } else {
            self.num.to_string()
        };
        let den = if self.den.len() > 1 || !self.den.terms()[0].1.is_one() {
            format!("({})", self.den)
        } else {
            self.den.to_string()
        };
        write!(f, "{num}/{den}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> RationalFunction {
        RationalFunction::var(x)
    }
    fn c(n: i64) -> RationalFunction {
        RationalFunction::from_int(n)
    }

    #[test]
    fn q_over_q_is_one() {
        let q = v(Var::Q);
        assert!((&q / &q).is_one());
    }

    #[test]
    fn difference_of_squares_cancels() {
        let (q, t) = (v(Var::Q), v(Var::T));
        let f = &(&(&q * &q) - &(&t * &t)) / &(&q - &t);
        assert_eq!(f, &q + &t);
        assert!(f.is_polynomial());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(c(1).checked_div(&c(0)), Err(FieldError::DivisionByZero));
        assert_eq!(
            RationalFunction::new(Polynomial::one(), Polynomial::zero()),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn derivative_of_q_squared_p() {
        let (q, p) = (v(Var::Q), v(Var::P));
        let f = &(&q * &q) * &p;
        assert_eq!(f.differentiate(Var::Q), &(&c(2) * &q) * &p);
    }

    #[test]
    fn quotient_rule() {
        let (q, t) = (v(Var::Q), v(Var::T));
        let f = &c(1) / &(&q - &t);
        let expected = &c(1) / &(&(&q - &t) * &(&q - &t));
        assert_eq!(f.differentiate(Var::T), expected);
    }

    #[test]
    fn substitution_of_backlund_image() {
        let (q, p, t) = (v(Var::Q), v(Var::P), v(Var::T));
        let a0 = &c(1) - &v(Var::A1);
        let img = &p - &(&a0 / &(&q - &t));
        let sub = Substitution::new().with(Var::P, img.clone());
        assert_eq!(p.substitute(&sub).unwrap(), img);
        assert_eq!(
            (&q * &t).substitute(&Substitution::new()).unwrap(),
            &q * &t
        );
    }

    #[test]
    fn substitution_into_denominator() {
        let (q, t) = (v(Var::Q), v(Var::T));
        let f = &c(1) / &(&q - &t);
        let sub = Substitution::new().with(Var::Q, &t / &q);
        let expected = &q / &(&t - &(&q * &t));
        assert_eq!(f.substitute(&sub).unwrap(), expected);
    }

    #[test]
    fn substitution_producing_zero_denominator_fails() {
        let (q, t) = (v(Var::Q), v(Var::T));
        let f = &c(1) / &(&q - &t);
        let sub = Substitution::new().with(Var::Q, t.clone());
        assert_eq!(f.substitute(&sub), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn complex_evaluation_and_pole() {
        let (q, t) = (v(Var::Q), v(Var::T));
        let pt = Point::new()
            .with(Var::Q, Complex64::new(2.0, 0.0))
            .with(Var::T, Complex64::new(3.0, 0.0));
        assert_eq!((&q + &t).eval_complex(&pt).unwrap(), Complex64::new(5.0, 0.0));
        let pole = Point::new()
            .with(Var::Q, Complex64::new(1.0, 0.0))
            .with(Var::T, Complex64::new(1.0, 0.0));
        let f = &c(1) / &(&q - &t);
        assert_eq!(f.eval_complex(&pole), Err(FieldError::Pole));
    }

    #[test]
    fn denominator_is_monic() {
        let q = v(Var::Q);
        let f = &c(1) / &(&c(2) * &q);
        assert!(f.denom().leading_coeff().is_one());
        assert_eq!(f.to_string(), "(1/2)/q");
    }
}
