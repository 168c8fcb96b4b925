//! Modular multivariate GCD.
//!
//! Images modulo 62-bit primes are computed by dense recursive evaluation and
//! Newton interpolation, one variable at a time, down to univariate Euclid.
//! Images are combined by Chinese remaindering until the integer candidate
//! stabilizes, and the candidate is accepted only after exact trial division
//! over the rationals.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::monomial::Monomial;
use crate::poly::Polynomial;
use crate::var::{Var, NVARS};
use crate::Rational;

type Mp = Vec<(Monomial, u64)>;
type Univ = Vec<u64>;

const MAX_PRIMES: usize = 24;

fn mulm(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn addm(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

fn subm(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

fn powm(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, a, p);
        }
        a = mulm(a, a, p);
        e >>= 1;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powm(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulm(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The largest primes below `2^62`, descending.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::with_capacity(MAX_PRIMES);
        let mut n = (1u64 << 62) - 1;
        while out.len() < MAX_PRIMES {
            if is_prime(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Deterministic xorshift stream of evaluation points in `[1, p)`.
struct Points {
    state: u64,
    p: u64,
}

impl Points {
    fn new(seed: u64, p: u64) -> Self {
        Points {
            state: seed ^ 0x9E37_79B9_7F4A_7C15,
            p,
        }
    }

    fn next(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        1 + x % (self.p - 1)
    }
}

fn utrim(mut a: Univ) -> Univ {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn ueval(a: &[u64], x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| addm(mulm(acc, x, p), c, p))
}

fn umul(a: &[u64], b: &[u64], p: u64) -> Univ {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = addm(out[i + j], mulm(x, y, p), p);
        }
    }
    utrim(out)
}

fn udivrem(a: &[u64], b: &[u64], p: u64) -> (Univ, Univ) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv = invm(b[db], p);
    if r.len() < b.len() {
        return (Vec::new(), utrim(r));
    }
    let mut q = vec![0; r.len() - db];
    for k in (0..q.len()).rev() {
        let c = mulm(r[k + db], inv, p);
        q[k] = c;
        if c == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            r[k + j] = subm(r[k + j], mulm(c, y, p), p);
        }
    }
    r.truncate(db);
    (utrim(q), utrim(r))
}

fn umonic(a: Univ, p: u64) -> Univ {
    match a.last() {
        None => a,
        Some(&lc) => {
            let inv = invm(lc, p);
            a.into_iter().map(|c| mulm(c, inv, p)).collect()
        }
    }
}

fn ugcd(a: &[u64], b: &[u64], p: u64) -> Univ {
    let (mut x, mut y) = (utrim(a.to_vec()), utrim(b.to_vec()));
    while !y.is_empty() {
        let (_, r) = udivrem(&x, &y, p);
        x = y;
        y = r;
    }
    umonic(x, p)
}

fn collect(terms: impl IntoIterator<Item = (Monomial, u64)>, p: u64) -> Mp {
    let mut acc: HashMap<Monomial, u64> = HashMap::new();
    for (m, c) in terms {
        let slot = acc.entry(m).or_insert(0);
        *slot = addm(*slot, c, p);
    }
    acc.into_iter().filter(|(_, c)| *c != 0).collect()
}

fn support(a: &Mp) -> u16 {
    a.iter().fold(0, |acc, (m, _)| acc | m.support())
}

fn degree_in(a: &Mp, v: Var) -> u16 {
    a.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
}

fn lex_cmp(a: &Monomial, b: &Monomial, vars: &[Var]) -> Ordering {
    for &v in vars {
        match a.exp(v).cmp(&b.exp(v)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn lex_lead(a: &Mp, vars: &[Var]) -> Option<(Monomial, u64)> {
    a.iter()
        .copied()
        .max_by(|x, y| lex_cmp(&x.0, &y.0, vars))
}

fn scale(a: &Mp, c: u64, p: u64) -> Mp {
    if c == 0 {
        return Vec::new();
    }
    a.iter().map(|(m, x)| (*m, mulm(*x, c, p))).collect()
}

fn monic(a: Mp, vars: &[Var], p: u64) -> Mp {
    match lex_lead(&a, vars) {
        None => a,
        Some((_, lc)) => scale(&a, invm(lc, p), p),
    }
}

/// Terms grouped by their exponents outside `x`, as univariates in `x`.
fn groups(a: &Mp, x: Var) -> HashMap<Monomial, Univ> {
    let mut out: HashMap<Monomial, Univ> = HashMap::new();
    for (m, c) in a {
        let e = m.exp(x) as usize;
        let u = out.entry(m.with_exp(x, 0)).or_default();
        if u.len() <= e {
            u.resize(e + 1, 0);
        }
        u[e] = *c;
    }
    out
}

fn content_in(a: &Mp, x: Var, p: u64) -> Univ {
    let mut acc: Univ = Vec::new();
    for u in groups(a, x).values() {
        acc = ugcd(&acc, u, p);
        if acc.len() == 1 {
            break;
        }
    }
    acc
}

fn from_groups(g: HashMap<Monomial, Univ>, x: Var) -> Mp {
    let mut out = Vec::new();
    for (m, u) in g {
        for (e, c) in u.into_iter().enumerate() {
            if c != 0 {
                out.push((m.with_exp(x, e as u16), c));
            }
        }
    }
    out
}

fn div_univ(a: &Mp, x: Var, c: &[u64], p: u64) -> Mp {
    if c.len() == 1 {
        return scale(a, invm(c[0], p), p);
    }
    let g = groups(a, x)
        .into_iter()
        .map(|(m, u)| (m, udivrem(&u, c, p).0))
        .collect();
    from_groups(g, x)
}

fn mul_univ(a: &Mp, x: Var, c: &[u64], p: u64) -> Mp {
    let mut out = Vec::with_capacity(a.len() * c.len());
    for (m, y) in a {
        for (e, &k) in c.iter().enumerate() {
            if k != 0 {
                out.push((m.with_exp(x, m.exp(x) + e as u16), mulm(*y, k, p)));
            }
        }
    }
    collect(out, p)
}

fn lc_rest(a: &Mp, x: Var, rest: &[Var]) -> Univ {
    let g = groups(a, x);
    g.into_iter()
        .max_by(|x, y| lex_cmp(&x.0, &y.0, rest))
        .map(|(_, u)| u)
        .unwrap_or_default()
}

fn eval_var(a: &Mp, x: Var, alpha: u64, p: u64) -> Mp {
    let d = degree_in(a, x) as usize;
    let mut pows = Vec::with_capacity(d + 1);
    pows.push(1u64);
    for k in 1..=d {
        pows.push(mulm(pows[k - 1], alpha, p));
    }
    collect(
        a.iter()
            .map(|(m, c)| (m.with_exp(x, 0), mulm(*c, pows[m.exp(x) as usize], p))),
        p,
    )
}

fn to_univ(a: &Mp, x: Var) -> Univ {
    let mut u = vec![0; degree_in(a, x) as usize + 1];
    for (m, c) in a {
        u[m.exp(x) as usize] = *c;
    }
    utrim(u)
}

fn from_univ(u: &[u64], x: Var) -> Mp {
    u.iter()
        .enumerate()
        .filter(|(_, c)| **c != 0)
        .map(|(e, c)| (Monomial::var(x, e as u16), *c))
        .collect()
}

/// Monic (lexicographically, over `vars`) gcd in `Z_p[vars]`.
fn pgcd(a: &Mp, b: &Mp, vars: &[Var], p: u64, seed: u64) -> Option<Mp> {
    if a.is_empty() {
        return Some(monic(b.clone(), vars, p));
    }
    if b.is_empty() {
        return Some(monic(a.clone(), vars, p));
    }
    let sup = support(a) | support(b);
    let vars: Vec<Var> = vars
        .iter()
        .copied()
        .filter(|v| sup & (1 << v.index()) != 0)
        .collect();
    if vars.is_empty() {
        return Some(vec![(Monomial::ONE, 1)]);
    }
    if vars.len() == 1 {
        let x = vars[0];
        return Some(from_univ(&ugcd(&to_univ(a, x), &to_univ(b, x), p), x));
    }
    let (x, rest) = vars.split_last().expect("nonempty");
    let x = *x;
    let ca = content_in(a, x, p);
    let cb = content_in(b, x, p);
    let c = ugcd(&ca, &cb, p);
    let a = div_univ(a, x, &ca, p);
    let b = div_univ(b, x, &cb, p);
    let la = lc_rest(&a, x, rest);
    let lb = lc_rest(&b, x, rest);
    let g = ugcd(&la, &lb, p);
    let bound = degree_in(&a, x).min(degree_in(&b, x)) as usize + g.len() - 1;

    let mut pts = Points::new(seed.wrapping_add(x.index() as u64 * 7919), p);
    let mut h: Option<(Mp, Monomial)> = None;
    let mut modulus: Univ = vec![1];
    for _ in 0..(4 * bound + 64) {
        let alpha = pts.next();
        if ueval(&la, alpha, p) == 0 || ueval(&lb, alpha, p) == 0 {
            continue;
        }
        let ha = pgcd(
            &eval_var(&a, x, alpha, p),
            &eval_var(&b, x, alpha, p),
            rest,
            p,
            seed.wrapping_mul(31).wrapping_add(alpha),
        )?;
        let (lead, _) = lex_lead(&ha, rest).expect("nonzero gcd image");
        if lead.is_one() {
            return Some(monic(from_univ(&c, x), &vars, p));
        }
        let ha = scale(&ha, ueval(&g, alpha, p), p);
        let (hcur, hlead) = match &h {
            None => {
                h = Some((ha, lead));
                modulus = vec![p - alpha, 1];
                continue;
            }
            Some(cur) => cur,
        };
        match lex_cmp(&lead, hlead, rest) {
            Ordering::Less => {
                h = Some((ha, lead));
                modulus = vec![p - alpha, 1];
                continue;
            }
            Ordering::Greater => continue,
            Ordering::Equal => {}
        }
        let at = eval_var(hcur, x, alpha, p);
        let diff = collect(
            ha.iter()
                .copied()
                .chain(at.iter().map(|(m, c)| (*m, p - c))),
            p,
        );
        let stable = diff.is_empty();
        let next = if stable {
            hcur.clone()
        } else {
            let w = invm(ueval(&modulus, alpha, p), p);
            let corr = mul_univ(&scale(&diff, w, p), x, &modulus, p);
            collect(hcur.iter().copied().chain(corr), p)
        };
        modulus = umul(&modulus, &[p - alpha, 1], p);
        let lead = *hlead;
        h = Some((next, lead));
        if stable || modulus.len() - 1 > bound {
            let (hh, _) = h.as_ref().expect("set above");
            let prim = div_univ(hh, x, &content_in(hh, x, p), p);
            return Some(monic(mul_univ(&prim, x, &c, p), &vars, p));
        }
    }
    None
}

fn integer_form(a: &Polynomial) -> Polynomial {
    let den = a
        .terms()
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| acc.lcm(c.denom()));
    let prim = a.scale(&Rational::from_integer(den));
    let content = prim
        .terms()
        .iter()
        .fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()));
    prim.scale(&Rational::new(BigInt::one(), content))
}

fn reduce_mod(c: &BigInt, p: u64) -> u64 {
    c.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn to_mod(a: &Polynomial, p: u64) -> Mp {
    a.terms()
        .iter()
        .map(|(m, c)| (*m, reduce_mod(c.numer(), p)))
        .filter(|(_, c)| *c != 0)
        .collect()
}

fn lex_lead_coeff(a: &Polynomial, vars: &[Var]) -> BigInt {
    a.terms()
        .iter()
        .max_by(|x, y| lex_cmp(&x.0, &y.0, vars))
        .map(|(_, c)| c.numer().clone())
        .expect("nonzero polynomial")
}

/// GCD of two nonzero polynomials, or `None` if no image could be certified.
pub(crate) fn modular_gcd(a: &Polynomial, b: &Polynomial) -> Option<Polynomial> {
    let ai = integer_form(a);
    let bi = integer_form(b);
    let sup = ai.support() | bi.support();
    let da = ai.degrees();
    let db = bi.degrees();
    let mut vars: Vec<Var> = (0..NVARS)
        .filter(|i| sup & (1 << i) != 0)
        .map(Var::from_index)
        .collect();
    // Highest degree first: it is handled by univariate Euclid, and the
    // interpolated variables should be the cheap ones.
    vars.sort_by_key(|v| std::cmp::Reverse(da[v.index()].max(db[v.index()])));
    let lca = lex_lead_coeff(&ai, &vars);
    let lcb = lex_lead_coeff(&bi, &vars);
    let gamma = lca.gcd(&lcb);

    let mut acc: Option<(HashMap<Monomial, BigInt>, BigInt, Monomial)> = None;
    let mut previous: Option<Polynomial> = None;
    for (k, &p) in primes().iter().enumerate() {
        if reduce_mod(&lca, p) == 0 || reduce_mod(&lcb, p) == 0 {
            continue;
        }
        let image = pgcd(&to_mod(&ai, p), &to_mod(&bi, p), &vars, p, k as u64 + 1)?;
        let (lead, _) = lex_lead(&image, &vars)?;
        if lead.is_one() {
            return Some(Polynomial::one());
        }
        let image = scale(&image, reduce_mod(&gamma, p), p);
        let pb = BigInt::from(p);
        match &mut acc {
            Some((_, _, cur)) if lex_cmp(&lead, cur, &vars) == Ordering::Greater => continue,
            Some((coeffs, modulus, cur)) if lex_cmp(&lead, cur, &vars) == Ordering::Equal => {
                let inv = BigInt::from(invm(reduce_mod(modulus, p), p));
                let img: HashMap<Monomial, u64> = image.into_iter().collect();
                let keys: Vec<Monomial> = coeffs.keys().chain(img.keys()).copied().collect();
                for m in keys {
                    let r = coeffs.get(&m).cloned().unwrap_or_else(BigInt::zero);
                    let s = BigInt::from(img.get(&m).copied().unwrap_or(0));
                    let t = ((s - &r) * &inv).mod_floor(&pb);
                    coeffs.insert(m, r + &*modulus * t);
                }
                *modulus *= &pb;
            }
            _ => {
                let coeffs = image.into_iter().map(|(m, c)| (m, BigInt::from(c))).collect();
                acc = Some((coeffs, pb, lead));
                previous = None;
                continue;
            }
        }
        let (coeffs, modulus, _) = acc.as_ref().expect("set above");
        let half: BigInt = modulus / 2;
        let candidate = Polynomial::from_terms(coeffs.iter().filter(|(_, c)| !c.is_zero()).map(
            |(m, c)| {
                let c = if c > &half { c - modulus } else { c.clone() };
                (*m, Rational::from_integer(c))
            },
        ));
        if previous.as_ref() == Some(&candidate) {
            let prim = integer_form(&candidate);
            if ai.div_exact(&prim).is_some() && bi.div_exact(&prim).is_some() {
                return Some(prim.monic());
            }
        }
        previous = Some(candidate);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: Var) -> Polynomial {
        Polynomial::var(x)
    }

    #[test]
    fn generated_moduli_are_prime() {
        let ps = primes();
        assert_eq!(ps.len(), MAX_PRIMES);
        assert!(ps.iter().all(|&p| p < 1 << 62 && is_prime(p)));
        assert!(!is_prime(1 << 61));
    }

    #[test]
    fn univariate_gcd_mod_p() {
        let p = 101;
        // (x + 1)(x + 2) and (x + 1)(x + 3)
        let a = umul(&[1, 1], &[2, 1], p);
        let b = umul(&[1, 1], &[3, 1], p);
        assert_eq!(ugcd(&a, &b, p), vec![1, 1]);
    }

    #[test]
    fn recovers_a_multivariate_factor_with_rational_coefficients() {
        let half = Polynomial::constant(Rational::new(1.into(), 2.into()));
        let f = &(&(&v(Var::Q) * &v(Var::P)) - &v(Var::A1)) + &(&half * &v(Var::T));
        let g1 = &(&v(Var::Q).pow(2) + &v(Var::A2)) - &v(Var::T);
        let g2 = &(&v(Var::P) * &v(Var::T)) + &v(Var::A3).pow(3);
        let a = &f.pow(2) * &g1;
        let b = &f * &g2;
        assert_eq!(modular_gcd(&a, &b), Some(f.monic()));
    }

    #[test]
    fn coprime_inputs_give_one() {
        let a = &v(Var::Q).pow(3) - &v(Var::T);
        let b = &(&v(Var::Q) * &v(Var::P)) + &v(Var::A4);
        assert_eq!(modular_gcd(&a, &b), Some(Polynomial::one()));
    }
}
