//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept sorted in strictly decreasing graded lexicographic order and
//! never carry a zero coefficient, so structural equality is mathematical
//! equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::monomial::Monomial;
use crate::var::{Var, NVARS};
use crate::{FieldError, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    terms: Vec<(Monomial, Rational)>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial {
                terms: vec![(Monomial::ONE, c)],
            }
        }
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: Var) -> Self {
        Self::monomial(Monomial::var(v, 1), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Polynomial { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated, unsorted) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            *acc.entry(m).or_insert_with(Rational::zero) += c;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .collect();
        Polynomial { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.as_slice() {
            [] => Some(Rational::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn leading_term(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn leading_coeff(&self) -> Rational {
        self.terms
            .first()
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> [u16; NVARS] {
        let mut d = [0u16; NVARS];
        for (m, _) in &self.terms {
            for (slot, &e) in d.iter_mut().zip(m.exps().iter()) {
                *slot = (*slot).max(e);
            }
        }
        d
    }

    /// Bitmask of variables that occur.
    pub fn support(&self) -> u16 {
        self.terms.iter().fold(0, |acc, (m, _)| acc | m.support())
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.support() & (1 << v.index()) != 0
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        match it.next() {
            None => Monomial::ONE,
            Some((first, _)) => it.fold(*first, |acc, (m, _)| acc.gcd(m)),
        }
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(m, a)| (*m, a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect(),
        }
    }

    /// Divides every term by `m`; caller guarantees divisibility.
    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.div(m).expect("monomial divides every term"), c.clone()))
                .collect(),
        }
    }

    /// Scales so that the leading coefficient is one.
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => Polynomial::zero(),
            Some((_, c)) if c.is_one() => self.clone(),
            Some((_, c)) => self.scale(&c.recip()),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut result = Polynomial::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Coefficients with respect to `v`: entry `k` multiplies `v^k`.
    pub fn coefficients_in(&self, v: Var) -> Vec<Polynomial> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.exp(v) as usize;
            buckets[k].push((m.with_exp(v, 0), c.clone()));
        }
        // Removing one variable from a sorted list can break grlex order.
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_by_key(|a| std::cmp::Reverse(a.0));
                Polynomial { terms: ts }
            })
            .collect()
    }

    /// Leading coefficient with respect to `v`, as a polynomial free of `v`.
    pub fn leading_coeff_in(&self, v: Var) -> Polynomial {
        let deg = self.degree_in(v);
        let mut ts: Vec<(Monomial, Rational)> = self
            .terms
            .iter()
            .filter(|(m, _)| m.exp(v) == deg)
            .map(|(m, c)| (m.with_exp(v, 0), c.clone()))
            .collect();
        ts.sort_by_key(|a| std::cmp::Reverse(a.0));
        Polynomial { terms: ts }
    }

    pub fn differentiate(&self, v: Var) -> Polynomial {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(v);
            if e == 0 {
                None
            } else {
                Some((m.with_exp(v, e - 1), c * Rational::from_integer(e.into())))
            }
        });
        Polynomial::from_terms(terms)
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Polynomial) -> Option<Polynomial> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Polynomial::zero());
        }
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        if divisor.is_monomial() {
            let (dm, dc) = &divisor.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c * &inv));
            }
            return Some(Polynomial { terms });
        }
        let (sd, dd) = (self.degrees(), divisor.degrees());
        if sd.iter().zip(dd.iter()).any(|(a, b)| a < b) {
            return None;
        }
        let (lm, lc) = divisor.terms[0].clone();
        let lc_inv = lc.recip();
        let mut rem: BTreeMap<Monomial, Rational> = self.terms.iter().cloned().collect();
        let mut quotient = Vec::new();
        while let Some((&m, _)) = rem.iter().next_back() {
            let c = rem.remove(&m).expect("present");
            let qm = m.div(&lm)?;
            let qc = &c * &lc_inv;
            for (dm, dc) in divisor.terms.iter().skip(1) {
                let key = dm.mul(&qm);
                let delta = dc * &qc;
                match rem.get_mut(&key) {
                    Some(slot) => {
                        *slot -= delta;
                        if slot.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    None => {
                        rem.insert(key, -delta);
                    }
                }
            }
            quotient.push((qm, qc));
        }
        Some(Polynomial { terms: quotient })
    }

    /// Pseudo-remainder of `self` by `divisor` with respect to `v`.
    pub fn pseudo_rem(&self, divisor: &Polynomial, v: Var) -> Polynomial {
        let dv = divisor.degree_in(v);
        let lc = divisor.leading_coeff_in(v);
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= dv {
            let rd = r.degree_in(v);
            let rlc = r.leading_coeff_in(v);
            let shift = Monomial::var(v, rd - dv);
            r = &(&r * &lc) - &(&rlc * &divisor.mul_monomial(&shift));
        }
        r
    }

    pub fn eval_complex(&self, point: &[Complex64; NVARS]) -> Complex64 {
        let mut pow_cache: Vec<Vec<Complex64>> = vec![vec![Complex64::new(1.0, 0.0)]; NVARS];
        let degs = self.degrees();
        for (i, cache) in pow_cache.iter_mut().enumerate() {
            for k in 1..=degs[i] as usize {
                let next = cache[k - 1] * point[i];
                cache.push(next);
            }
        }
        self.terms
            .iter()
            .map(|(m, c)| {
                let coeff = Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0);
                m.exps()
                    .iter()
                    .enumerate()
                    .fold(coeff, |acc, (i, &e)| acc * pow_cache[i][e as usize])
            })
            .sum()
    }

    /// Sum of the absolute values of the evaluated terms; scale for pole tests.
    pub fn eval_magnitude(&self, point: &[Complex64; NVARS]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let coeff = c.to_f64().unwrap_or(f64::NAN).abs();
                m.exps()
                    .iter()
                    .enumerate()
                    .fold(coeff, |acc, (i, &e)| acc * point[i].norm().powi(e as i32))
            })
            .sum()
    }

    /// Evaluates with polynomial images; `None` entries keep the variable.
    pub fn compose(&self, images: &[Option<Polynomial>; NVARS]) -> Polynomial {
        let degs = self.degrees();
        let mut cache: Vec<Vec<Polynomial>> = Vec::with_capacity(NVARS);
        for (i, img) in images.iter().enumerate() {
            let mut powers = vec![Polynomial::one()];
            if let Some(img) = img {
                for k in 1..=degs[i] as usize {
                    let next = &powers[k - 1] * img;
                    powers.push(next);
                }
            }
            cache.push(powers);
        }
        let mut acc: Vec<(Monomial, Rational)> = Vec::new();
        for (m, c) in &self.terms {
            let mut kept = Monomial::ONE;
            let mut factor = Polynomial::constant(c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if images[i].is_some() {
                    factor = &factor * &cache[i][e as usize];
                } else {
                    kept = kept.with_exp(Var::from_index(i), e);
                }
            }
            acc.extend(factor.mul_monomial(&kept).terms);
        }
        Polynomial::from_terms(acc)
    }

    fn add_impl(&self, other: &Polynomial, negate_other: bool) -> Polynomial {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate_other { -&b[j].1 } else { b[j].1.clone() };
                    out.push((b[j].0, c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for (m, c) in &b[j..] {
            out.push((*m, if negate_other { -c } else { c.clone() }));
        }
        Polynomial { terms: out }
    }

    fn mul_impl(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut prods: Vec<(Monomial, Rational)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                prods.push((ma.mul(mb), ca * cb));
            }
        }
        prods.sort_unstable_by_key(|x| std::cmp::Reverse(x.0));
        let mut out: Vec<(Monomial, Rational)> = Vec::with_capacity(prods.len());
        for (m, c) in prods {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc += c,
                _ => {
                    if let Some((_, lc)) = out.last() {
                        if lc.is_zero() {
                            out.pop();
                        }
                    }
                    out.push((m, c));
                }
            }
        }
        if let Some((_, lc)) = out.last() {
            if lc.is_zero() {
                out.pop();
            }
        }
        Polynomial { terms: out }
    }

    pub fn check_invariants(&self) -> Result<(), FieldError> {
        for w in self.terms.windows(2) {
            if w[0].0 <= w[1].0 {
                return Err(FieldError::Internal("terms out of order".into()));
            }
        }
        if self.terms.iter().any(|(_, c)| c.is_zero()) {
            return Err(FieldError::Internal("zero coefficient stored".into()));
        }
        Ok(())
    }
}

impl<'a> Add<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &'a Polynomial) -> Polynomial {
        self.add_impl(rhs, false)
    }
}

impl<'a> Sub<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &'a Polynomial) -> Polynomial {
        self.add_impl(rhs, true)
    }
}

impl<'a> Mul<&'a Polynomial> for &'a Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &'a Polynomial) -> Polynomial {
        self.mul_impl(rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: Polynomial) -> Polynomial {
        &self + &rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    m.exps()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let v = Var::from_index(i);
            if e == 1 {
                v.name().to_string()
            } else {
                format!("{}^{}", v.name(), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&abs))?;
            } else if abs.is_one() {
                f.write_str(&fmt_monomial(m))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&abs), fmt_monomial(m))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Polynomial {
        Polynomial::var(Var::Q)
    }
    fn t() -> Polynomial {
        Polynomial::var(Var::T)
    }

    #[test]
    fn difference_of_squares_divides_exactly() {
        let a = &(&q() * &q()) - &(&t() * &t());
        let b = &q() - &t();
        assert_eq!(a.div_exact(&b), Some(&q() + &t()));
        assert_eq!(b.div_exact(&(&q() + &Polynomial::one())), None);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&q().scale(&Rational::new(3.into(), 2.into())) * &t()) - &Polynomial::one();
        assert_eq!(p.to_string(), "3/2*q*t - 1");
        assert_eq!(Polynomial::zero().to_string(), "0");
    }

    #[test]
    fn coefficients_split_by_variable() {
        let p = &(&(&q() * &q()) * &t()) + &(&q() + &Polynomial::from_int(2));
        let cs = p.coefficients_in(Var::Q);
        assert_eq!(cs, vec![Polynomial::from_int(2), Polynomial::one(), t()]);
    }

    #[test]
    fn pseudo_remainder_vanishes_on_multiples() {
        let b = &(&q() * &t()) - &Polynomial::one();
        let a = &b * &(&q() + &t());
        assert!(a.pseudo_rem(&b, Var::Q).is_zero());
    }

    #[test]
    fn arithmetic_keeps_canonical_order() {
        let p = &(&q() + &t()).pow(4) - &(&q() - &t()).pow(3);
        p.check_invariants().unwrap();
        assert_eq!(p.total_degree(), 4);
    }
}
