//! Bäcklund transformations as automorphisms of the differential field
//! `Q(a1, a2, a3, a4, q, p, t)` with derivation `delta`.

use std::fmt;

use pvi_field::{Rational, RationalFunction, Substitution, Var};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::expr::{c, p, q, t, Rf};
use crate::hamiltonian::{alpha0_symbolic, poisson, HamiltonianSystem};
use crate::report::{Check, Report};
use crate::weyl::{
    fundamental_relations, root_action, translation_shift, translation_word, AffineRootVec,
    Generator, GroupWord,
};
use crate::{lax, CoreError, Result};

/// Images of the roots and of `(q, p, t)` under one field automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BirationalMap {
    pub roots: AffineRootVec,
    pub q: Rf,
    pub p: Rf,
    pub t: Rf,
}

/// The symbolic simple root `alpha_j` as an element of the field.
pub fn alpha(j: usize) -> Rf {
    match j {
        0 => alpha0_symbolic(),
        1 => RationalFunction::var(Var::A1),
        2 => RationalFunction::var(Var::A2),
        3 => RationalFunction::var(Var::A3),
        4 => RationalFunction::var(Var::A4),
        _ => panic!("no simple root alpha{j}"),
    }
}

/// The polynomials `phi_0..phi_4` and the bracket matrix `U` that encode
/// the reflections `s_i(phi_j) = phi_j + (alpha_i / phi_i) u_ij`.
#[derive(Clone, Debug)]
pub struct PhiSystem {
    pub phi: [Rf; 5],
    pub u: [[i64; 5]; 5],
}

impl Default for PhiSystem {
    fn default() -> Self {
        Self::new()
    }
}

impl PhiSystem {
    pub fn new() -> Self {
        PhiSystem {
            phi: [q() - t(), c(1), -p(), q() - c(1), q()],
            u: [
                [0, 0, 1, 0, 0],
                [0, 0, 0, 0, 0],
                [-1, 0, 0, -1, -1],
                [0, 0, 1, 0, 0],
                [0, 0, 1, 0, 0],
            ],
        }
    }

    /// Whether `u_ij = {phi_i, phi_j}` holds for all entries.
    pub fn check(&self) -> bool {
        (0..5).all(|i| {
            (0..5).all(|j| poisson(&self.phi[i], &self.phi[j]) == c(self.u[i][j]))
        })
    }

    /// `s_i(phi_j)`.
    pub fn reflect(&self, i: usize, j: usize) -> Rf {
        let u = self.u[i][j];
        if u == 0 {
            return self.phi[j].clone();
        }
        &self.phi[j] + c(u) * alpha(i) / &self.phi[i]
    }
}

impl BirationalMap {
    pub fn identity() -> Self {
        BirationalMap {
            roots: AffineRootVec::identity(),
            q: q(),
            p: p(),
            t: t(),
        }
    }

    /// Images of `a1..a4, q, p, t`.
    pub fn substitution(&self) -> Substitution {
        let mut sub = Substitution::new();
        for (j, v) in [(1, Var::A1), (2, Var::A2), (3, Var::A3), (4, Var::A4)] {
            sub.set(v, self.roots.forms[j].to_rf());
        }
        sub.set(Var::Q, self.q.clone());
        sub.set(Var::P, self.p.clone());
        sub.set(Var::T, self.t.clone());
        sub
    }

    /// The automorphism applied to `f`.
    pub fn apply(&self, f: &Rf) -> Result<Rf> {
        Ok(f.substitute(&self.substitution())?)
    }

    /// The map on a point `(a1, a2, a3, a4, q, p, t)` of exact values.
    pub fn eval_at(&self, point: &RationalPoint) -> Result<RationalPoint> {
        let values: Vec<(Var, Rational)> = POINT_VARS.iter().copied().zip(point.iter().cloned()).collect();
        let eval = |f: &Rf| -> Result<Rational> { Ok(f.eval_rational(&values)?) };
        Ok([
            eval(&self.root_image(1))?,
            eval(&self.root_image(2))?,
            eval(&self.root_image(3))?,
            eval(&self.root_image(4))?,
            eval(&self.q)?,
            eval(&self.p)?,
            eval(&self.t)?,
        ])
    }

    /// Image of `alpha_j`.
    pub fn root_image(&self, j: usize) -> Rf {
        self.roots.forms[j].to_rf()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let roots: Vec<serde_json::Value> = self
            .roots
            .forms
            .iter()
            .map(|f| {
                json!({
                    "constant": f.constant.to_string(),
                    "eps": f.eps.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                    "expr": f.to_string(),
                })
            })
            .collect();
        json!({
            "roots": roots,
            "q": self.q.to_string(),
            "p": self.p.to_string(),
            "t": self.t.to_string(),
        })
    }
}

impl fmt::Display for BirationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, form) in self.roots.forms.iter().enumerate() {
            writeln!(f, "a{j} -> {form}")?;
        }
        writeln!(f, "q -> {}", self.q)?;
        writeln!(f, "p -> {}", self.p)?;
        write!(f, "t -> {}", self.t)
    }
}

/// The reflection `s_i` read from the phi system.
pub fn reflection_map(i: usize) -> BirationalMap {
    let phi = PhiSystem::new();
    BirationalMap {
        roots: root_action(Generator::S(i), &AffineRootVec::identity()),
        q: phi.reflect(i, 4),
        p: -phi.reflect(i, 2),
        t: t(),
    }
}

pub fn generator_map(g: Generator) -> Result<BirationalMap> {
    match g {
        Generator::S(i) => Ok(reflection_map(i)),
        Generator::R(k) => lax::derived_r_map(k),
    }
}

/// `m1 m2` as operators: `m2` is applied first.
pub fn compose(m1: &BirationalMap, m2: &BirationalMap) -> Result<BirationalMap> {
    let sub = m1.substitution();
    let image = |f: &Rf| -> Result<Rf> {
        f.substitute(&sub).map_err(|e| {
            CoreError::Invalid(format!("degenerate composition: {e}"))
        })
    };
    Ok(BirationalMap {
        roots: m2.roots.substitute(&m1.roots),
        q: image(&m2.q)?,
        p: image(&m2.p)?,
        t: image(&m2.t)?,
    })
}

/// The automorphism of a word, composed generator by generator.
pub fn word_map(w: &GroupWord) -> Result<BirationalMap> {
    word_map_with(w, generator_map)
}

/// [`word_map`] with a custom generator table.
pub fn word_map_with(
    w: &GroupWord,
    gens: impl Fn(Generator) -> Result<BirationalMap>,
) -> Result<BirationalMap> {
    let mut acc = BirationalMap::identity();
    for &g in w.generators() {
        acc = compose(&acc, &gens(g)?)?;
    }
    Ok(acc)
}

/// Exact values of `a1, a2, a3, a4, q, p, t`.
pub type RationalPoint = [Rational; 7];

const POINT_VARS: [Var; 7] = [Var::A1, Var::A2, Var::A3, Var::A4, Var::Q, Var::P, Var::T];

/// A word evaluated pointwise, one generator at a time; no symbolic
/// composition takes place.
pub fn word_eval(
    w: &GroupWord,
    gens: &dyn Fn(Generator) -> Result<BirationalMap>,
    point: &RationalPoint,
) -> Result<RationalPoint> {
    let mut x = point.clone();
    for &g in w.generators() {
        x = gens(g)?.eval_at(&x)?;
    }
    Ok(x)
}

/// A seeded point with small random rational coordinates.
pub fn random_point(rng: &mut ChaCha8Rng) -> RationalPoint {
    std::array::from_fn(|_| {
        let n: i64 = rng.gen_range(-40..=40);
        let d: i64 = rng.gen_range(1..=29);
        Rational::new(n.into(), d.into())
    })
}

/// Whether two words agree as maps: exactly on roots, and by exact
/// evaluation at `trials` random points for `(q, p, t)`.
pub fn words_agree(
    u: &GroupWord,
    v: &GroupWord,
    gens: &dyn Fn(Generator) -> Result<BirationalMap>,
    trials: usize,
    seed: u64,
) -> Result<(bool, String)> {
    let roots = |w: &GroupWord| -> Result<AffineRootVec> {
        let mut acc = AffineRootVec::identity();
        for &g in w.generators() {
            acc = gens(g)?.roots.substitute(&acc);
        }
        Ok(acc)
    };
    let (roots_u, roots_v) = (roots(u)?, roots(v)?);
    if roots_u != roots_v {
        return Ok((false, "root images differ".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0;
    let mut attempts = 0;
    while done < trials {
        attempts += 1;
        if attempts > 20 * trials {
            return Err(CoreError::Invalid("no regular sample point found".into()));
        }
        let x = random_point(&mut rng);
        let (a, b) = match (word_eval(u, gens, &x), word_eval(v, gens, &x)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => continue,
        };
        if a != b {
            return Ok((false, format!("images differ at {:?}", x.iter().map(|c| c.to_string()).collect::<Vec<_>>())));
        }
        done += 1;
    }
    Ok((true, format!("equal root images; equal exact values at {trials} random points")))
}

/// Whether `delta(m(x)) = m(delta(x))` for `x = q, p`.
pub fn commutes_with_delta(m: &BirationalMap) -> Result<bool> {
    let sys = HamiltonianSystem::symbolic();
    for (x, image) in [(q(), &m.q), (p(), &m.p)] {
        let lhs = sys.delta(image);
        let rhs = m.apply(&sys.delta(&x))?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(m.t == t() || sys.delta(&m.t) == c(1))
}

/// Whether `m` preserves the bracket: `{m(p), m(q)} = 1`, and `t` and the
/// parameter images Poisson-commute with everything.
pub fn canonical_check(m: &BirationalMap) -> Result<bool> {
    if poisson(&m.p, &m.q) != c(1) {
        return Ok(false);
    }
    let mut passive = vec![m.t.clone()];
    passive.extend((0..5).map(|j| m.root_image(j)));
    for f in &passive {
        if !poisson(f, &m.q).is_zero() || !poisson(f, &m.p).is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Random points per commutation check.
pub const COMMUTATION_TRIALS: usize = 4;

/// Every fundamental relation as an equality of automorphisms, plus the
/// translation table and commutativity of translations.
pub fn verify_map_relations(
    gens: &(dyn Fn(Generator) -> Result<BirationalMap> + Sync),
) -> Result<Report> {
    let mut report = Report::new();
    for rel in fundamental_relations() {
        let l = word_map_with(&rel.lhs, gens)?;
        let r = word_map_with(&rel.rhs, gens)?;
        let pass = l == r;
        let detail = if pass {
            "equal images of roots, q, p, t".to_string()
        } else {
            describe_difference(&l, &r)
        };
        report.push(Check::new(
            "weyl-relations",
            format!("maps: {}", rel.name),
            pass,
            detail,
            "fundamental relations",
        ));
    }
    let translations: Vec<BirationalMap> = (1..=4)
        .map(|i| word_map_with(&translation_word(i), gens))
        .collect::<Result<_>>()?;
    for (i, m) in translations.iter().enumerate() {
        let expected = translation_shift(i + 1);
        let got = m.roots.shifts();
        let pass = got
            .as_ref()
            .map(|s| s.iter().zip(expected.iter()).all(|(a, &b)| *a == Rational::from_integer(b.into())))
            .unwrap_or(false);
        report.push(Check::new(
            "weyl-relations",
            format!("T{} shifts roots by {:?}", i + 1, expected),
            pass,
            match got {
                Some(s) => format!("shifts {:?}", s.iter().map(|x| x.to_string()).collect::<Vec<_>>()),
                None => "not a translation".into(),
            },
            "translation table",
        ));
    }
    for i in 1..=4 {
        for j in i + 1..=4 {
            let (ti, tj) = (translation_word(i), translation_word(j));
            let (pass, detail) = words_agree(
                &ti.concat(&tj),
                &tj.concat(&ti),
                gens,
                COMMUTATION_TRIALS,
                (10 * i + j) as u64,
            )?;
            report.push(Check::new(
                "weyl-relations",
                format!("T{i} T{j} = T{j} T{i}"),
                pass,
                detail,
                "commuting Schlesinger transformations",
            ));
        }
    }
    Ok(report)
}

fn describe_difference(a: &BirationalMap, b: &BirationalMap) -> String {
    let mut parts = Vec::new();
    if a.roots != b.roots {
        parts.push("root images differ".to_string());
    }
    for (name, x, y) in [("q", &a.q, &b.q), ("p", &a.p, &b.p), ("t", &a.t, &b.t)] {
        if x != y {
            parts.push(format!("{name}: {x} vs {y}"));
        }
    }
    parts.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s0_matches_the_explicit_formula() {
        let m = reflection_map(0);
        assert_eq!(m.q, q());
        assert_eq!(m.p, p() - alpha(0) / (q() - t()));
        assert_eq!(m.root_image(0), -alpha(0));
        assert_eq!(m.root_image(2), alpha(2) + alpha(0));
    }

    #[test]
    fn s1_fixes_q_and_p() {
        let m = reflection_map(1);
        assert_eq!((m.q, m.p), (q(), p()));
    }

    #[test]
    fn s2_moves_q() {
        let m = reflection_map(2);
        assert_eq!(m.q, q() + alpha(2) / p());
        assert_eq!(m.p, p());
    }

    #[test]
    fn phi_brackets_match_u() {
        assert!(PhiSystem::new().check());
    }

    #[test]
    fn reflections_are_involutions() {
        for i in 0..5 {
            let m = reflection_map(i);
            assert_eq!(compose(&m, &m).unwrap(), BirationalMap::identity(), "s{i}");
        }
    }

    #[test]
    fn corrupted_s0_fails_delta_commutation() {
        let mut m = reflection_map(0);
        m.p = p() - c(2) * alpha(0) / (q() - t());
        assert!(!commutes_with_delta(&m).unwrap());
        assert!(commutes_with_delta(&reflection_map(0)).unwrap());
    }

    #[test]
    fn scaling_q_is_not_canonical() {
        let mut m = BirationalMap::identity();
        m.q = c(2) * q();
        assert!(!canonical_check(&m).unwrap());
        assert!(canonical_check(&BirationalMap::identity()).unwrap());
    }
}
