//! Multivariate polynomial GCD over the rationals.
//!
//! Recursive content / primitive-part decomposition with a primitive
//! pseudo-remainder sequence in one chosen variable. Exact throughout; the
//! inputs met in practice have few variables of low degree, so the simple
//! algorithm is adequate once the cheap cases are peeled off.

use crate::poly::Polynomial;
use crate::var::{Var, NVARS};

/// Monic greatest common divisor (zero only when both inputs are zero).
pub fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a = if ma.is_one() { a.clone() } else { a.div_monomial(&ma) };
    let b = if mb.is_one() { b.clone() } else { b.div_monomial(&mb) };
    let g = gcd_no_monomial(&a, &b);
    g.mul_monomial(&mg).monic()
}

/// GCD of a list, stopping early once it becomes constant.
pub fn gcd_many<'a>(items: impl IntoIterator<Item = &'a Polynomial>) -> Polynomial {
    let mut acc = Polynomial::zero();
    for p in items {
        acc = gcd(&acc, p);
        if acc.is_one() {
            break;
        }
    }
    acc
}

fn gcd_no_monomial(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_constant() || b.is_constant() {
        return Polynomial::one();
    }
    if a.monic() == b.monic() {
        return a.monic();
    }
    if a.len() <= b.len() {
        if b.div_exact(a).is_some() {
            return a.monic();
        }
    } else if a.div_exact(b).is_some() {
        return b.monic();
    }
    if let Some(g) = crate::modgcd::modular_gcd(a, b) {
        return g;
    }

    let sa = a.support();
    let sb = b.support();
    // A variable present on one side only must be absent from the gcd.
    if let Some(v) = first_var(sa & !sb) {
        return gcd_with_content(a, b, v);
    }
    if let Some(v) = first_var(sb & !sa) {
        return gcd_with_content(b, a, v);
    }

    let da = a.degrees();
    let db = b.degrees();
    let v = (0..NVARS)
        .filter(|&i| sa & (1 << i) != 0)
        .min_by_key(|&i| (da[i].min(db[i]), da[i].max(db[i])))
        .map(Var::from_index)
        .expect("non-constant polynomial has a variable");

    let ca = gcd_many_sorted(a.coefficients_in(v));
    let cb = gcd_many_sorted(b.coefficients_in(v));
    let content_gcd = gcd(&ca, &cb);
    let pa = a.div_exact(&ca).expect("content divides");
    let pb = b.div_exact(&cb).expect("content divides");
    let prim = primitive_prs(pa, pb, v);
    (&content_gcd * &prim).monic()
}

/// gcd(a, b) where `v` occurs in `a` but not in `b`.
fn gcd_with_content(a: &Polynomial, b: &Polynomial, v: Var) -> Polynomial {
    let mut coeffs = a.coefficients_in(v);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.len());
    let mut acc = b.clone();
    for c in &coeffs {
        acc = gcd(&acc, c);
        if acc.is_one() {
            break;
        }
    }
    acc.monic()
}

fn gcd_many_sorted(mut coeffs: Vec<Polynomial>) -> Polynomial {
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.len());
    gcd_many(coeffs.iter())
}

fn first_var(mask: u16) -> Option<Var> {
    (0..NVARS).find(|i| mask & (1 << i) != 0).map(Var::from_index)
}

/// Primitive part with respect to `v`.
pub fn primitive_part(p: &Polynomial, v: Var) -> Polynomial {
    if p.is_zero() {
        return Polynomial::zero();
    }
    let c = gcd_many_sorted(p.coefficients_in(v));
    p.div_exact(&c).expect("content divides")
}

/// GCD of two polynomials that are primitive with respect to `v`.
fn primitive_prs(a: Polynomial, b: Polynomial, v: Var) -> Polynomial {
    let (mut r0, mut r1) = if a.degree_in(v) >= b.degree_in(v) {
        (a, b)
    } else {
        (b, a)
    };
    loop {
        if r1.is_zero() {
            return r0.monic();
        }
        if r1.degree_in(v) == 0 {
            return Polynomial::one();
        }
        if r1.degree_in(v) == 1 {
            // A primitive polynomial of degree one in v is irreducible over the
            // coefficient domain, so it either divides r0 or is coprime to it.
            return if r0.div_exact(&r1).is_some() {
                r1.monic()
            } else {
                Polynomial::one()
            };
        }
        let r = r0.pseudo_rem(&r1, v);
        r0 = r1;
        r1 = if r.is_zero() { r } else { primitive_part(&r, v) };
        // Strip monomial factors in v picked up by the remainder; the inputs
        // carry none, so neither does their gcd.
        if !r1.is_zero() {
            let m = r1.monomial_content();
            if !m.is_one() {
                r1 = r1.div_monomial(&m);
            }
        }
    }
}

/// Least common multiple, monic.
pub fn lcm(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let g = gcd(a, b);
    (&a.div_exact(&g).expect("gcd divides") * b).monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn v(x: Var) -> Polynomial {
        Polynomial::var(x)
    }
    fn c(n: i64) -> Polynomial {
        Polynomial::from_int(n)
    }

    #[test]
    fn gcd_of_coprime_linear_forms_is_one() {
        let a = &v(Var::Q) - &v(Var::T);
        let b = &v(Var::Q) - &c(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn gcd_recovers_shared_factor() {
        let f = &(&v(Var::Q) * &v(Var::P)) - &v(Var::A1);
        let a = &f * &(&v(Var::T) + &c(3));
        let b = &f * &(&v(Var::Q) - &v(Var::T));
        assert_eq!(gcd(&a, &b), f.monic());
    }

    #[test]
    fn gcd_handles_monomial_factors_and_scaling() {
        let a = (&v(Var::Q).pow(2) * &v(Var::T)).scale(&Rational::new(3.into(), 4.into()));
        let b = &v(Var::Q) * &v(Var::P);
        assert_eq!(gcd(&a, &b), v(Var::Q));
    }

    #[test]
    fn gcd_with_repeated_factor() {
        let f = &v(Var::Q) - &v(Var::T);
        let a = &f.pow(3) * &(&v(Var::P) + &c(1));
        let b = &f.pow(2) * &(&v(Var::P) - &c(1));
        assert_eq!(gcd(&a, &b), f.pow(2).monic());
    }

    #[test]
    fn gcd_of_higher_degree_in_every_variable() {
        let f = &(&v(Var::Q).pow(2) * &v(Var::T)) + &(&v(Var::P).pow(2) - &v(Var::A2));
        let g1 = &(&v(Var::Q).pow(2) + &v(Var::P).pow(2)) + &v(Var::T);
        let g2 = &(&v(Var::Q) * &v(Var::P)) + &(&v(Var::T).pow(2) + &c(5));
        let a = &f * &g1;
        let b = &f * &g2;
        assert_eq!(gcd(&a, &b), f.monic());
    }
}
