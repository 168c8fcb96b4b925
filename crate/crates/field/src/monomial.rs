use std::cmp::Ordering;

use crate::var::{Var, NVARS};

/// Exponent vector over the fixed variable set.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    exps: [u16; NVARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { exps: [0; NVARS] };

    pub fn new(exps: [u16; NVARS]) -> Self {
        Monomial { exps }
    }

    pub fn var(v: Var, e: u16) -> Self {
        let mut m = Monomial::ONE;
        m.exps[v.index()] = e;
        m
    }

    pub fn exps(&self) -> &[u16; NVARS] {
        &self.exps
    }

    pub fn exp(&self, v: Var) -> u16 {
        self.exps[v.index()]
    }

    pub fn with_exp(mut self, v: Var, e: u16) -> Self {
        self.exps[v.index()] = e;
        self
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a += *b;
        }
        Monomial { exps }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            if *a < *b {
                return None;
            }
            *a -= *b;
        }
        Some(Monomial { exps })
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps.iter()) {
            *a = (*a).min(*b);
        }
        Monomial { exps }
    }

    /// Bitmask of variables with a positive exponent.
    pub fn support(&self) -> u16 {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0, |acc, (i, _)| acc | (1 << i))
    }
}

impl Ord for Monomial {
    /// Graded lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_prefers_total_degree_then_earlier_variables() {
        let q2 = Monomial::var(Var::Q, 2);
        let a1 = Monomial::var(Var::A1, 1);
        let t = Monomial::var(Var::T, 1);
        assert!(q2 > a1);
        assert!(a1 > t);
        assert!(Monomial::ONE < t);
    }

    #[test]
    fn division_and_gcd() {
        let m = Monomial::var(Var::Q, 3).mul(&Monomial::var(Var::T, 1));
        let n = Monomial::var(Var::Q, 1).mul(&Monomial::var(Var::P, 2));
        assert_eq!(m.gcd(&n), Monomial::var(Var::Q, 1));
        assert_eq!(m.div(&Monomial::var(Var::Q, 2)), Some(Monomial::var(Var::Q, 1).mul(&Monomial::var(Var::T, 1))));
        assert_eq!(m.div(&n), None);
    }
}
