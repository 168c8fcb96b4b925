//! The extended affine Weyl group of type `D4^(1)` acting on the simple
//! affine roots.
//!
//! Words compose as operator products: in `g1 g2 ... gn` the leftmost
//! generator is applied last. As automorphisms, `(g1 g2)(f) = g1(g2(f))`,
//! so the images of a word are obtained by processing it left to right,
//! substituting the images accumulated so far into each new generator's
//! images.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use pvi_field::{Polynomial, Rational, RationalFunction, Var};
use serde::Serialize;

use crate::report::{Check, Report};
use crate::{CoreError, Result};

/// The Cartan matrix of `D4^(1)`, node 2 in the centre.
pub const CARTAN: [[i64; 5]; 5] = [
    [2, 0, -1, 0, 0],
    [0, 2, -1, 0, 0],
    [-1, -1, 2, -1, -1],
    [0, 0, -1, 2, 0],
    [0, 0, -1, 0, 2],
];

/// Multiplicities of the simple roots in the null root.
pub const NULL_ROOT: [i64; 5] = [1, 1, 2, 1, 1];

pub fn cartan() -> [[i64; 5]; 5] {
    CARTAN
}

/// Diagram automorphism `sigma_k` on node indices, `k` in `{1, 3, 4}`.
pub fn sigma(k: usize) -> [usize; 5] {
    match k {
        1 => [1, 0, 2, 4, 3],
        3 => [3, 4, 2, 0, 1],
        4 => [4, 3, 2, 1, 0],
        _ => panic!("no diagram automorphism r{k}"),
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Generator {
    /// Simple reflection `s_i`, `i` in `0..=4`.
    S(usize),
    /// Diagram rotation `r_k`, `k` in `{1, 3, 4}`.
    R(usize),
}

impl Generator {
    pub const ALL: [Generator; 8] = [
        Generator::S(0),
        Generator::S(1),
        Generator::S(2),
        Generator::S(3),
        Generator::S(4),
        Generator::R(1),
        Generator::R(3),
        Generator::R(4),
    ];
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::S(i) => write!(f, "s{i}"),
            Generator::R(k) => write!(f, "r{k}"),
        }
    }
}

impl FromStr for Generator {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "s0" => Ok(Generator::S(0)),
            "s1" => Ok(Generator::S(1)),
            "s2" => Ok(Generator::S(2)),
            "s3" => Ok(Generator::S(3)),
            "s4" => Ok(Generator::S(4)),
            "r1" => Ok(Generator::R(1)),
            "r3" => Ok(Generator::R(3)),
            "r4" => Ok(Generator::R(4)),
            _ => Err(CoreError::ParseWord(format!("unknown generator `{s}`"))),
        }
    }
}

/// A product of generators, leftmost applied last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct GroupWord(pub Vec<Generator>);

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord(Vec::new())
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &GroupWord) -> GroupWord {
        GroupWord(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    pub fn pow(&self, n: usize) -> GroupWord {
        GroupWord(self.0.repeat(n))
    }

    /// Inverse word: generators are involutions, so reverse the order.
    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(Generator::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Whitespace-separated tags such as `s0 s2 r1`; `T1..T4` expand to the
/// translation words and `1` or `e` denote the identity.
impl FromStr for GroupWord {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        let mut gens = Vec::new();
        for tok in s.split_whitespace() {
            match tok {
                "1" | "e" => {}
                "T1" | "T2" | "T3" | "T4" => {
                    let i = tok[1..].parse().expect("digit");
                    gens.extend(translation_word(i).0);
                }
                _ => gens.push(tok.parse()?),
            }
        }
        Ok(GroupWord(gens))
    }
}

/// Affine-linear functional `c + sum e_k eps_k` on the parameter space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineForm {
    pub constant: Rational,
    pub eps: [Rational; 4],
}

fn r(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

impl AffineForm {
    pub fn zero() -> Self {
        AffineForm {
            constant: Rational::zero(),
            eps: [r(0), r(0), r(0), r(0)],
        }
    }

    pub fn constant(c: Rational) -> Self {
        AffineForm {
            constant: c,
            ..Self::zero()
        }
    }

    pub fn new(constant: i64, eps: [i64; 4]) -> Self {
        AffineForm {
            constant: r(constant),
            eps: eps.map(r),
        }
    }

    /// The simple affine root `alpha_j` in epsilon coordinates.
    pub fn alpha(j: usize) -> Self {
        match j {
            0 => Self::new(1, [-1, -1, 0, 0]),
            1 => Self::new(0, [1, -1, 0, 0]),
            2 => Self::new(0, [0, 1, -1, 0]),
            3 => Self::new(0, [0, 0, 1, -1]),
            4 => Self::new(0, [0, 0, 1, 1]),
            _ => panic!("no simple root alpha{j}"),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        AffineForm {
            constant: &self.constant + &other.constant,
            eps: std::array::from_fn(|k| &self.eps[k] + &other.eps[k]),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        AffineForm {
            constant: &self.constant * c,
            eps: std::array::from_fn(|k| &self.eps[k] * c),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&r(-1)))
    }

    pub fn is_constant(&self) -> bool {
        self.eps.iter().all(Zero::is_zero)
    }

    pub fn eval(&self, eps: &[Rational; 4]) -> Rational {
        self.eps
            .iter()
            .zip(eps.iter())
            .fold(self.constant.clone(), |acc, (a, b)| acc + a * b)
    }

    /// As a rational function of `a1..a4`.
    pub fn to_rf(&self) -> RationalFunction {
        let e = epsilon_in_alphas();
        let mut out = RationalFunction::constant(self.constant.clone());
        for (k, coeff) in self.eps.iter().enumerate() {
            if !coeff.is_zero() {
                out = out + e[k].scale(coeff);
            }
        }
        out
    }

    /// Inverse of [`AffineForm::to_rf`]; `None` unless the input is affine in
    /// `a1..a4` alone.
    pub fn from_rf(f: &RationalFunction) -> Option<Self> {
        let poly: &Polynomial = f.as_polynomial()?;
        let mut out = AffineForm::zero();
        for (m, coeff) in poly.terms() {
            if m.is_one() {
                out.constant += coeff;
                continue;
            }
            if m.degree() != 1 {
                return None;
            }
            let j = [Var::A1, Var::A2, Var::A3, Var::A4]
                .iter()
                .position(|&v| m.exp(v) == 1)?
                + 1;
            out = out.add(&AffineForm::alpha(j).scale(coeff));
        }
        Some(out)
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() {
            parts.push(self.constant.to_string());
        }
        for (k, e) in self.eps.iter().enumerate() {
            if e.is_zero() {
                continue;
            }
            if e.is_one() {
                parts.push(format!("e{}", k + 1));
            } else if *e == r(-1) {
                parts.push(format!("-e{}", k + 1));
            } else {
                parts.push(format!("{}*e{}", e, k + 1));
            }
        }
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + ").replace("+ -", "- "))
        }
    }
}

/// `eps_1..eps_4` as rational functions of `a1..a4`.
pub fn epsilon_in_alphas() -> [RationalFunction; 4] {
    let a = |v| RationalFunction::var(v);
    let half = Rational::new(1.into(), 2.into());
    let e3 = (a(Var::A3) + a(Var::A4)).scale(&half);
    let e4 = (a(Var::A4) - a(Var::A3)).scale(&half);
    let e2 = a(Var::A2) + &e3;
    let e1 = a(Var::A1) + &e2;
    [e1, e2, e3, e4]
}

/// Images of the five simple affine roots under some group element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineRootVec {
    pub forms: [AffineForm; 5],
}

impl AffineRootVec {
    pub fn identity() -> Self {
        AffineRootVec {
            forms: std::array::from_fn(AffineForm::alpha),
        }
    }

    /// `a0 + a1 + 2 a2 + a3 + a4` of the images.
    pub fn null_root(&self) -> AffineForm {
        self.forms
            .iter()
            .zip(NULL_ROOT.iter())
            .fold(AffineForm::zero(), |acc, (f, &m)| acc.add(&f.scale(&r(m))))
    }

    pub fn satisfies_null_relation(&self) -> bool {
        self.null_root() == AffineForm::constant(r(1))
    }

    /// Images of `eps_1..eps_4`, read back through the simple roots.
    pub fn epsilon_images(&self) -> [AffineForm; 4] {
        let half = Rational::new(1.into(), 2.into());
        let f = &self.forms;
        let e3 = f[3].add(&f[4]).scale(&half);
        let e4 = f[4].sub(&f[3]).scale(&half);
        let e2 = f[2].add(&e3);
        let e1 = f[1].add(&e2);
        [e1, e2, e3, e4]
    }

    /// Replaces every `eps_k` in `self` by its image under `inner`. If `self`
    /// holds the images of `g` and `inner` those of `h`, the result holds the
    /// images of the product `h g`.
    pub fn substitute(&self, inner: &AffineRootVec) -> AffineRootVec {
        let e = inner.epsilon_images();
        AffineRootVec {
            forms: std::array::from_fn(|j| {
                let f = &self.forms[j];
                let mut out = AffineForm::constant(f.constant.clone());
                for (k, coeff) in f.eps.iter().enumerate() {
                    if !coeff.is_zero() {
                        out = out.add(&e[k].scale(coeff));
                    }
                }
                out
            }),
        }
    }

    /// Evaluates the images at a parameter point given in epsilon coordinates.
    pub fn eval(&self, eps: &[Rational; 4]) -> [Rational; 5] {
        std::array::from_fn(|j| self.forms[j].eval(eps))
    }

    /// `a_j - k` for the constant shifts of a translation, `None` otherwise.
    pub fn shifts(&self) -> Option<[Rational; 5]> {
        let id = AffineRootVec::identity();
        let mut out: [Rational; 5] = std::array::from_fn(|_| r(0));
        for j in 0..5 {
            let d = self.forms[j].sub(&id.forms[j]);
            if !d.is_constant() {
                return None;
            }
            out[j] = d.constant;
        }
        Some(out)
    }
}

/// `g` applied after the element whose root images are `roots`.
pub fn root_action(g: Generator, roots: &AffineRootVec) -> AffineRootVec {
    root_action_with(g, roots, &CARTAN)
}

/// [`root_action`] with an explicit Cartan matrix.
pub fn root_action_with(g: Generator, roots: &AffineRootVec, a: &[[i64; 5]; 5]) -> AffineRootVec {
    let f = &roots.forms;
    match g {
        Generator::S(i) => AffineRootVec {
            forms: std::array::from_fn(|j| f[j].sub(&f[i].scale(&r(a[i][j])))),
        },
        Generator::R(k) => {
            let s = sigma(k);
            AffineRootVec {
                forms: std::array::from_fn(|j| f[s[j]].clone()),
            }
        }
    }
}

pub fn apply_word(w: &GroupWord, roots: &AffineRootVec) -> AffineRootVec {
    apply_word_with(w, roots, &CARTAN)
}

pub fn apply_word_with(w: &GroupWord, roots: &AffineRootVec, a: &[[i64; 5]; 5]) -> AffineRootVec {
    w.0.iter()
        .fold(roots.clone(), |acc, &g| root_action_with(g, &acc, a))
}

/// A defining relation `lhs = rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub name: String,
    pub lhs: GroupWord,
    pub rhs: GroupWord,
}

fn word(gens: &[Generator]) -> GroupWord {
    GroupWord(gens.to_vec())
}

/// The defining relations of the extended group.
pub fn fundamental_relations() -> Vec<Relation> {
    use Generator::{R, S};
    let mut out = Vec::new();
    let id = GroupWord::identity();
    for i in 0..5 {
        out.push(Relation {
            name: format!("s{i}^2 = 1"),
            lhs: word(&[S(i), S(i)]),
            rhs: id.clone(),
        });
    }
    let outer = [0, 1, 3, 4];
    for (a, &i) in outer.iter().enumerate() {
        for &j in &outer[a + 1..] {
            out.push(Relation {
                name: format!("s{i} s{j} = s{j} s{i}"),
                lhs: word(&[S(i), S(j)]),
                rhs: word(&[S(j), S(i)]),
            });
        }
    }
    for &i in &outer {
        out.push(Relation {
            name: format!("s{i} s2 s{i} = s2 s{i} s2"),
            lhs: word(&[S(i), S(2), S(i)]),
            rhs: word(&[S(2), S(i), S(2)]),
        });
    }
    let rots = [1, 3, 4];
    for &k in &rots {
        out.push(Relation {
            name: format!("r{k}^2 = 1"),
            lhs: word(&[R(k), R(k)]),
            rhs: id.clone(),
        });
    }
    for &i in &rots {
        for &j in &rots {
            if i == j {
                continue;
            }
            let k = 8 - i - j;
            out.push(Relation {
                name: format!("r{i} r{j} = r{k}"),
                lhs: word(&[R(i), R(j)]),
                rhs: word(&[R(k)]),
            });
        }
    }
    for &i in &rots {
        let s = sigma(i);
        for j in 0..5 {
            out.push(Relation {
                name: format!("r{i} s{j} = s{} r{i}", s[j]),
                lhs: word(&[R(i), S(j)]),
                rhs: word(&[S(s[j]), R(i)]),
            });
        }
    }
    out
}

/// Checks every fundamental relation on the root space.
pub fn verify_relations() -> Report {
    verify_relations_with(&CARTAN)
}

pub fn verify_relations_with(a: &[[i64; 5]; 5]) -> Report {
    let id = AffineRootVec::identity();
    fundamental_relations()
        .into_iter()
        .map(|rel| {
            let l = apply_word_with(&rel.lhs, &id, a);
            let rr = apply_word_with(&rel.rhs, &id, a);
            let pass = l == rr && l.satisfies_null_relation();
            let detail = if pass {
                "equal affine maps".to_string()
            } else {
                format!("lhs images differ from rhs images for `{}`", rel.name)
            };
            Check::new("weyl-relations", format!("roots: {}", rel.name), pass, detail, "fundamental relations")
        })
        .collect()
}

/// The translation `T_{w_i}` as a generator word.
pub fn translation_word(i: usize) -> GroupWord {
    let text = match i {
        1 => "r1 s1 s2 s3 s4 s2 s1",
        2 => "s0 s2 s1 s3 s4 s2 s1 s3 s4 s2",
        3 => "r3 s3 s2 s1 s4 s2 s3",
        4 => "r4 s4 s2 s1 s3 s2 s4",
        _ => panic!("no translation T{i}"),
    };
    text.parse().expect("well-formed translation word")
}

/// Constant shifts of `(a0..a4)` under `T_{w_i}`.
pub fn translation_shift(i: usize) -> [i64; 5] {
    match i {
        1 => [1, -1, 0, 0, 0],
        2 => [2, 0, -1, 0, 0],
        3 => [1, 0, 0, -1, 0],
        4 => [1, 0, 0, 0, -1],
        _ => panic!("no translation T{i}"),
    }
}

/// A weight in epsilon coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector(pub [Rational; 4]);

impl WeightVector {
    /// The fundamental weight `w_i`.
    pub fn fundamental(i: usize) -> Self {
        let h = Rational::new(1.into(), 2.into());
        let (o, z) = (r(1), r(0));
        WeightVector(match i {
            1 => [o, z.clone(), z.clone(), z],
            2 => [o.clone(), o, z.clone(), z],
            3 => [h.clone(), h.clone(), h.clone(), -h],
            4 => [h.clone(), h.clone(), h.clone(), h],
            _ => panic!("no fundamental weight w{i}"),
        })
    }
}

/// Whether `v` lies in the weight lattice: `2v` integral with all
/// coordinates of one parity.
pub fn lattice_member(v: &WeightVector) -> bool {
    let doubled: Vec<Rational> = v.0.iter().map(|x| x * r(2)).collect();
    if doubled.iter().any(|x| !x.is_integer()) {
        return false;
    }
    let half = Rational::new(1.into(), 2.into());
    let even: Vec<bool> = doubled.iter().map(|x| (x * &half).is_integer()).collect();
    even.iter().all(|&b| b) || even.iter().all(|&b| !b)
}
