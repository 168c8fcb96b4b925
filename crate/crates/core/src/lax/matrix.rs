//! Laurent polynomials in `z` (half-integer powers allowed) and 8x8 matrices
//! over them.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use pvi_field::{Rational, Scalar};
use rayon::prelude::*;
use serde_json::json;

/// Size of the matrix realization of `so(8)`.
pub const N: usize = 8;

/// `sum c_k z^(k/2)`, keyed by the doubled exponent `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPoly<T> {
    terms: BTreeMap<i32, T>,
}

impl<T: Scalar> LaurentPoly<T> {
    pub fn zero() -> Self {
        LaurentPoly {
            terms: BTreeMap::new(),
        }
    }

    /// `c z^(half_exp / 2)`.
    pub fn monomial(c: T, half_exp: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half_exp, c);
        }
        LaurentPoly { terms }
    }

    pub fn constant(c: T) -> Self {
        Self::monomial(c, 0)
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// `z^k` for an integer `k`.
    pub fn z_pow(k: i32) -> Self {
        Self::monomial(T::one(), 2 * k)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Pairs `(doubled exponent, coefficient)`, increasing.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &T)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    /// Coefficient of `z^(half_exp / 2)`.
    pub fn coeff(&self, half_exp: i32) -> Option<&T> {
        self.terms.get(&half_exp)
    }

    /// Coefficient of `z^k`, zero if absent.
    pub fn coeff_int(&self, k: i32) -> T {
        self.terms.get(&(2 * k)).cloned().unwrap_or_else(T::zero)
    }

    pub fn has_half_powers(&self) -> bool {
        self.terms.keys().any(|k| k % 2 != 0)
    }

    fn insert_add(terms: &mut BTreeMap<i32, T>, k: i32, c: T) {
        match terms.get_mut(&k) {
            Some(slot) => {
                let s = slot.add(&c);
                if s.is_zero() {
                    terms.remove(&k);
                } else {
                    *slot = s;
                }
            }
            None => {
                if !c.is_zero() {
                    terms.insert(k, c);
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::insert_add(&mut terms, *k, c.clone());
        }
        LaurentPoly { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            Self::insert_add(&mut terms, *k, c.neg());
        }
        LaurentPoly { terms }
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                Self::insert_add(&mut terms, a + b, x.mul(y));
            }
        }
        LaurentPoly { terms }
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Coefficientwise map; zero results are dropped.
    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        self.map_into(f)
    }

    pub fn map_into<U: Scalar>(&self, f: impl Fn(&T) -> U) -> LaurentPoly<U> {
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, c)| {
                let v = f(c);
                (!v.is_zero()).then_some((*k, v))
            })
            .collect();
        LaurentPoly { terms }
    }

    pub fn try_map_into<U: Scalar, E>(
        &self,
        f: impl Fn(&T) -> Result<U, E>,
    ) -> Result<LaurentPoly<U>, E> {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            let v = f(c)?;
            if !v.is_zero() {
                terms.insert(*k, v);
            }
        }
        Ok(LaurentPoly { terms })
    }

    /// `z d/dz`.
    pub fn z_deriv(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| **k != 0)
            .map(|(k, c)| (*k, c.scale(&Rational::new((*k).into(), 2.into()))))
            .collect();
        LaurentPoly { terms }
    }
}

impl<T: Scalar> fmt::Display for LaurentPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(k, c)| {
                let zpart = match k {
                    0 => String::new(),
                    2 => "z".to_string(),
                    k if k % 2 == 0 => format!("z^{}", k / 2),
                    k => format!("z^({}/2)", k),
                };
                let cs = c.to_string();
                if zpart.is_empty() {
                    cs
                } else if cs == "1" {
                    zpart
                } else if cs == "-1" {
                    format!("-{zpart}")
                } else if cs.contains(' ') {
                    format!("({cs})*{zpart}")
                } else {
                    format!("{cs}*{zpart}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// An 8x8 matrix with Laurent-polynomial entries; indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopMatrix<T> {
    entries: Vec<LaurentPoly<T>>,
}

impl<T: Scalar> LoopMatrix<T> {
    pub fn zero() -> Self {
        LoopMatrix {
            entries: vec![LaurentPoly::zero(); N * N],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.set(i, i, LaurentPoly::one());
        }
        m
    }

    pub fn from_fn(f: impl Fn(usize, usize) -> LaurentPoly<T>) -> Self {
        LoopMatrix {
            entries: (0..N * N).map(|k| f(k / N, k % N)).collect(),
        }
    }

    /// The matrix unit with `c z^(half_exp/2)` at `(i, j)`.
    pub fn unit(i: usize, j: usize, c: T, half_exp: i32) -> Self {
        let mut m = Self::zero();
        m.set(i, j, LaurentPoly::monomial(c, half_exp));
        m
    }

    pub fn diag(d: [LaurentPoly<T>; N]) -> Self {
        let mut m = Self::zero();
        for (i, x) in d.into_iter().enumerate() {
            m.set(i, i, x);
        }
        m
    }

    /// `J = sum E_{i, 9-i}`.
    pub fn j() -> Self {
        Self::from_fn(|i, j| {
            if i + j == N - 1 {
                LaurentPoly::one()
            } else {
                LaurentPoly::zero()
            }
        })
    }

    pub fn get(&self, i: usize, j: usize) -> &LaurentPoly<T> {
        &self.entries[i * N + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: LaurentPoly<T>) {
        self.entries[i * N + j] = x;
    }

    pub fn entries(&self) -> &[LaurentPoly<T>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(LaurentPoly::is_zero)
    }

    pub fn nonzero_positions(&self) -> Vec<(usize, usize)> {
        (0..N * N)
            .filter(|k| !self.entries[*k].is_zero())
            .map(|k| (k / N, k % N))
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        LoopMatrix {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        LoopMatrix {
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a.sub(b))
                .collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|x| x.neg())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|x| x.mul(c))
    }

    /// Product; the 64 entries are computed in parallel.
    pub fn mul(&self, other: &Self) -> Self {
        let entries = (0..N * N)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / N, k % N);
                let mut acc = LaurentPoly::zero();
                for l in 0..N {
                    let a = self.get(i, l);
                    if a.is_zero() {
                        continue;
                    }
                    let b = other.get(l, j);
                    if b.is_zero() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                acc
            })
            .collect();
        LoopMatrix { entries }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(|i, j| self.get(j, i).clone())
    }

    /// Entrywise coefficient map, in parallel.
    pub fn map(&self, f: impl Fn(&T) -> T + Sync) -> Self {
        self.map_into(f)
    }

    pub fn map_into<U: Scalar>(&self, f: impl Fn(&T) -> U + Sync) -> LoopMatrix<U> {
        LoopMatrix {
            entries: self.entries.par_iter().map(|e| e.map_into(&f)).collect(),
        }
    }

    pub fn try_map_into<U: Scalar, E: Send>(
        &self,
        f: impl Fn(&T) -> Result<U, E> + Sync,
    ) -> Result<LoopMatrix<U>, E> {
        let entries: Result<Vec<_>, E> = self
            .entries
            .par_iter()
            .map(|e| e.try_map_into(&f))
            .collect();
        Ok(LoopMatrix { entries: entries? })
    }

    /// Entrywise `z d/dz`.
    pub fn z_deriv(&self) -> Self {
        LoopMatrix {
            entries: self.entries.iter().map(LaurentPoly::z_deriv).collect(),
        }
    }

    /// `J X + X^t J`, zero for elements of `so(8)[z, 1/z]`.
    pub fn algebra_defect(&self) -> Self {
        let j = Self::j();
        j.mul(self).add(&self.transpose().mul(&j))
    }

    pub fn in_algebra(&self) -> bool {
        self.algebra_defect().is_zero()
    }

    /// `X^t J X - J`, zero for elements of the loop group.
    pub fn group_defect(&self) -> Self {
        let j = Self::j();
        self.transpose().mul(&j).mul(self).sub(&j)
    }

    pub fn in_group(&self) -> bool {
        self.group_defect().is_zero()
    }

    /// Aligned text rendering, one row per line.
    pub fn to_text(&self) -> String {
        let cells: Vec<String> = self.entries.iter().map(|e| e.to_string()).collect();
        let widths: Vec<usize> = (0..N)
            .map(|j| (0..N).map(|i| cells[i * N + j].len()).max().unwrap_or(1))
            .collect();
        let mut out = String::new();
        for i in 0..N {
            let row: Vec<String> = (0..N)
                .map(|j| format!("{:>w$}", cells[i * N + j], w = widths[j]))
                .collect();
            out.push_str("[ ");
            out.push_str(&row.join("  "));
            out.push_str(" ]\n");
        }
        out
    }

    /// Rows of entry strings.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = (0..N)
            .map(|i| (0..N).map(|j| self.get(i, j).to_string()).collect())
            .collect();
        json!(rows)
    }
}

impl<T: Scalar> LoopMatrix<T> {
    /// Number of nonzero coefficients; a size measure for reports.
    pub fn term_count(&self) -> usize {
        self.entries.iter().map(|e| e.terms().count()).sum()
    }
}

impl<T: Scalar> Zero for LaurentPoly<T> {
    fn zero() -> Self {
        LaurentPoly::zero()
    }
    fn is_zero(&self) -> bool {
        LaurentPoly::is_zero(self)
    }
}

impl<T: Scalar> std::ops::Add for LaurentPoly<T> {
    type Output = LaurentPoly<T>;
    fn add(self, rhs: Self) -> Self {
        LaurentPoly::add(&self, &rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pvi_field::RationalFunction as Rf;

    #[test]
    fn half_powers_multiply_to_integer_powers() {
        let w: LaurentPoly<Rf> = LaurentPoly::monomial(Rf::one(), 1);
        let z = w.mul(&w);
        assert_eq!(z, LaurentPoly::z_pow(1));
        assert!(!z.has_half_powers());
    }

    #[test]
    fn z_derivative_scales_by_exponent() {
        let w: LaurentPoly<Rf> = LaurentPoly::monomial(Rf::from_int(4), -3);
        assert_eq!(w.z_deriv(), LaurentPoly::monomial(Rf::from_int(-6), -3));
        assert!(LaurentPoly::<Rf>::one().z_deriv().is_zero());
    }

    #[test]
    fn j_squares_to_identity_and_is_in_group() {
        let j = LoopMatrix::<Rf>::j();
        assert_eq!(j.mul(&j), LoopMatrix::identity());
        assert!(j.in_group());
        assert!(LoopMatrix::<Rf>::identity().in_group());
    }
}
