//! Parameters, the Hamiltonian `H`, the derivation `delta`, the Poisson
//! bracket, the scalar P_VI residual and the Fuchsian coefficients `a1, a2`.
//!
//! The Poisson bracket uses the orientation `{f, g} = f_p g_q - f_q g_p`,
//! so `{p, q} = 1`. Many references use the opposite sign.

use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use pvi_field::{Point, Rational, Substitution, Var};
use serde::{Deserialize, Serialize};

use crate::expr::{c, fr, p, q, t, v, Rf};
use crate::{CoreError, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamKind {
    /// `(e1, e2, e3, e4)`.
    Epsilon,
    /// `(a0, a1, a2, a3, a4)`.
    Alpha,
    /// `(k0, k1, kt, kinf, rho)`.
    Kappa,
}

impl fmt::Display for ParamKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParamKind::Epsilon => "epsilon",
            ParamKind::Alpha => "alpha",
            ParamKind::Kappa => "kappa",
        })
    }
}

/// A parameter point in one of three coordinate systems.
///
/// Values are rational functions so that the same type carries both the
/// generic symbolic point (`a1..a4` as variables) and concrete rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVec {
    kind: ParamKind,
    values: Vec<Rf>,
}

/// `1 - a1 - 2 a2 - a3 - a4`.
pub fn alpha0_symbolic() -> Rf {
    c(1) - v(Var::A1) - c(2) * v(Var::A2) - v(Var::A3) - v(Var::A4)
}

impl ParamVec {
    /// The generic point: `a1..a4` are ring variables and `a0` is eliminated.
    pub fn symbolic() -> Self {
        ParamVec {
            kind: ParamKind::Alpha,
            values: vec![
                alpha0_symbolic(),
                v(Var::A1),
                v(Var::A2),
                v(Var::A3),
                v(Var::A4),
            ],
        }
    }

    pub fn alpha(values: [Rf; 5]) -> Result<Self> {
        let pv = ParamVec {
            kind: ParamKind::Alpha,
            values: values.to_vec(),
        };
        pv.validate()?;
        Ok(pv)
    }

    /// Alpha form from `a1..a4`, completing `a0` by the null-root relation.
    pub fn from_alpha_tail(tail: [Rational; 4]) -> Self {
        let [a1, a2, a3, a4] = tail.map(Rf::constant);
        let a0 = c(1) - &a1 - c(2) * &a2 - &a3 - &a4;
        ParamVec {
            kind: ParamKind::Alpha,
            values: vec![a0, a1, a2, a3, a4],
        }
    }

    pub fn epsilon(values: [Rf; 4]) -> Self {
        ParamVec {
            kind: ParamKind::Epsilon,
            values: values.to_vec(),
        }
    }

    /// Kappa form, ordered `(k0, k1, kt, kinf, rho)`.
    pub fn kappa(values: [Rf; 5]) -> Result<Self> {
        let pv = ParamVec {
            kind: ParamKind::Kappa,
            values: values.to_vec(),
        };
        pv.validate()?;
        Ok(pv)
    }

    pub fn kind(&self) -> ParamKind {
        self.kind
    }

    pub fn values(&self) -> &[Rf] {
        &self.values
    }

    fn validate(&self) -> Result<()> {
        let sum = match self.kind {
            ParamKind::Epsilon => return Ok(()),
            ParamKind::Alpha => {
                let a = &self.values;
                &a[0] + &a[1] + c(2) * &a[2] + &a[3] + &a[4]
            }
            ParamKind::Kappa => {
                let k = &self.values;
                &k[0] + &k[1] + &k[2] + &k[3] + c(2) * &k[4]
            }
        };
        if sum.is_one() {
            Ok(())
        } else {
            Err(CoreError::InvalidParams(format!(
                "{} coordinates sum to {sum}, expected 1",
                self.kind
            )))
        }
    }

    pub fn alphas(&self) -> [Rf; 5] {
        let x = &self.values;
        match self.kind {
            ParamKind::Alpha => [
                x[0].clone(),
                x[1].clone(),
                x[2].clone(),
                x[3].clone(),
                x[4].clone(),
            ],
            ParamKind::Kappa => [
                x[2].clone(),
                x[3].clone(),
                x[4].clone(),
                x[1].clone(),
                x[0].clone(),
            ],
            ParamKind::Epsilon => [
                c(1) - &x[0] - &x[1],
                &x[0] - &x[1],
                &x[1] - &x[2],
                &x[2] - &x[3],
                &x[2] + &x[3],
            ],
        }
    }

    pub fn epsilons(&self) -> [Rf; 4] {
        if self.kind == ParamKind::Epsilon {
            let x = &self.values;
            return [x[0].clone(), x[1].clone(), x[2].clone(), x[3].clone()];
        }
        let a = self.alphas();
        let half = fr(1, 2);
        let e3 = &half * (&a[3] + &a[4]);
        let e4 = &half * (&a[4] - &a[3]);
        let e2 = &a[2] + &e3;
        let e1 = &a[1] + &e2;
        [e1, e2, e3, e4]
    }

    /// `(k0, k1, kt, kinf, rho)`.
    pub fn kappas(&self) -> [Rf; 5] {
        let a = self.alphas();
        [
            a[4].clone(),
            a[3].clone(),
            a[0].clone(),
            a[1].clone(),
            a[2].clone(),
        ]
    }

    pub fn convert(&self, target: ParamKind) -> ParamVec {
        let values = match target {
            ParamKind::Alpha => self.alphas().to_vec(),
            ParamKind::Epsilon => self.epsilons().to_vec(),
            ParamKind::Kappa => self.kappas().to_vec(),
        };
        ParamVec {
            kind: target,
            values,
        }
    }

    /// Exact values when every entry is a rational constant.
    pub fn as_rationals(&self) -> Option<Vec<Rational>> {
        self.values.iter().map(Rf::as_constant).collect()
    }

    /// Complex alphas `(a0..a4)`; requires constant entries.
    pub fn complex_alphas(&self) -> Result<[Complex64; 5]> {
        let mut out = [Complex64::new(0.0, 0.0); 5];
        for (slot, a) in out.iter_mut().zip(self.alphas().iter()) {
            *slot = a.eval_complex(&Point::new())?;
        }
        Ok(out)
    }

    /// Substitution `a1..a4 -> values`, for specializing symbolic results.
    pub fn specialization(&self) -> Substitution {
        let a = self.alphas();
        Substitution::new()
            .with(Var::A1, a[1].clone())
            .with(Var::A2, a[2].clone())
            .with(Var::A3, a[3].clone())
            .with(Var::A4, a[4].clone())
    }
}

impl fmt::Display for ParamVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|x| x.to_string()).collect();
        write!(f, "{}({})", self.kind, parts.join(", "))
    }
}

/// Constants `(alpha, beta, gamma, delta)` of the scalar equation.
#[derive(Clone, Debug, PartialEq)]
pub struct PViConstants<T> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub delta: T,
}

pub fn pvi_constants(pv: &ParamVec) -> PViConstants<Rf> {
    let [k0, k1, kt, kinf, _] = pv.kappas();
    pvi_constants_from_kappa(&k0, &k1, &kt, &kinf)
}

/// The constant map alone, without the Fuchs relation.
pub fn pvi_constants_from_kappa(k0: &Rf, k1: &Rf, kt: &Rf, kinf: &Rf) -> PViConstants<Rf> {
    let half = fr(1, 2);
    PViConstants {
        alpha: &half * (kinf * kinf),
        beta: -(&half * (k0 * k0)),
        gamma: &half * (k1 * k1),
        delta: &half * (c(1) - kt * kt),
    }
}

impl PViConstants<Rf> {
    pub fn to_complex(&self) -> Result<PViConstants<Complex64>> {
        let pt = Point::new();
        Ok(PViConstants {
            alpha: self.alpha.eval_complex(&pt)?,
            beta: self.beta.eval_complex(&pt)?,
            gamma: self.gamma.eval_complex(&pt)?,
            delta: self.delta.eval_complex(&pt)?,
        })
    }
}

/// `H` built from the kappa parameters.
pub fn hamiltonian_h(pv: &ParamVec) -> Rf {
    hamiltonian_h_shifted(pv, 1)
}

/// [`hamiltonian_h`] with `kt - 1` replaced by `kt - shift`.
pub fn hamiltonian_h_shifted(pv: &ParamVec, shift: i64) -> Rf {
    let [k0, k1, kt, kinf, rho] = pv.kappas();
    let (q, p, t) = (q(), p(), t());
    let q1 = &q - c(1);
    let qt = &q - &t;
    let bracket = &k0 * (&q1 * &qt) + &k1 * (&q * &qt) + (&kt - c(shift)) * (&q * &q1);
    let body = &p * &p * &q * &q1 * &qt - &p * bracket + &rho * (&kinf + &rho) * &qt;
    body / (&t * (&t - c(1)))
}

/// `H` built from the alpha parameters.
pub fn hamiltonian_h_alpha(pv: &ParamVec) -> Rf {
    let [a0, a1, a2, a3, a4] = pv.alphas();
    let (q, p, t) = (q(), p(), t());
    let q1 = &q - c(1);
    let qt = &q - &t;
    let bracket = (&a0 - c(1)) * (&q * &q1) + &a3 * (&q * &qt) + &a4 * (&q1 * &qt);
    let body = &p * &p * &q * &q1 * &qt - &p * bracket + &a2 * (&a1 + &a2) * &qt;
    body / (&t * (&t - c(1)))
}

/// Right-hand sides of the expanded system, `(dq/dt, dp/dt)`.
pub fn expanded_system(pv: &ParamVec) -> (Rf, Rf) {
    let [k0, k1, kt, kinf, rho] = pv.kappas();
    let (q, p, t) = (q(), p(), t());
    let q1 = &q - c(1);
    let qt = &q - &t;
    let tt = &t * (&t - c(1));
    let qdot = c(2) * &p * &q * &q1 * &qt
        - (&k0 * (&q1 * &qt) + &k1 * (&q * &qt) + (&kt - c(1)) * (&q * &q1));
    let pdot = -(&p * &p) * (c(3) * &q * &q - c(2) * (c(1) + &t) * &q + &t)
        + &p * (c(2) * (&k0 + &k1 + &kt - c(1)) * &q - &k0 * (c(1) + &t) - &k1 * &t - &kt + c(1))
        - &rho * (&kinf + &rho);
    (qdot / &tt, pdot / &tt)
}

/// `{f, g} = f_p g_q - f_q g_p`.
pub fn poisson(f: &Rf, g: &Rf) -> Rf {
    f.differentiate(Var::P) * g.differentiate(Var::Q)
        - f.differentiate(Var::Q) * g.differentiate(Var::P)
}

/// The Hamiltonian vector field `delta = H_p d/dq - H_q d/dp + d/dt` for
/// fixed parameters.
#[derive(Clone, Debug)]
pub struct HamiltonianSystem {
    params: ParamVec,
    h: Rf,
    h_p: Rf,
    h_q: Rf,
}

impl HamiltonianSystem {
    pub fn new(params: ParamVec) -> Self {
        let h = hamiltonian_h(&params);
        let h_p = h.differentiate(Var::P);
        let h_q = h.differentiate(Var::Q);
        HamiltonianSystem { params, h, h_p, h_q }
    }

    /// Shared instance over the generic parameter point.
    pub fn symbolic() -> &'static HamiltonianSystem {
        static SYS: OnceLock<HamiltonianSystem> = OnceLock::new();
        SYS.get_or_init(|| HamiltonianSystem::new(ParamVec::symbolic()))
    }

    pub fn params(&self) -> &ParamVec {
        &self.params
    }

    pub fn h(&self) -> &Rf {
        &self.h
    }

    /// `dq/dt = H_p`.
    pub fn qdot(&self) -> &Rf {
        &self.h_p
    }

    /// `dp/dt = -H_q`.
    pub fn pdot(&self) -> Rf {
        -&self.h_q
    }

    pub fn delta(&self, f: &Rf) -> Rf {
        let mut out = f.differentiate(Var::T);
        if f.contains_var(Var::Q) {
            out = out + &self.h_p * f.differentiate(Var::Q);
        }
        if f.contains_var(Var::P) {
            out = out - &self.h_q * f.differentiate(Var::P);
        }
        out
    }
}

/// `delta` over the generic parameter point.
pub fn delta_derivation(f: &Rf) -> Rf {
    HamiltonianSystem::symbolic().delta(f)
}

fn pvi_rhs_complex(
    y: Complex64,
    y1: Complex64,
    t: Complex64,
    k: &PViConstants<Complex64>,
) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let ym1 = y - one;
    let ymt = y - t;
    let tm1 = t - one;
    0.5 * (one / y + one / ym1 + one / ymt) * y1 * y1 - (one / t + one / tm1 + one / ymt) * y1
        + y * ym1 * ymt / (t * t * tm1 * tm1)
            * (k.alpha + k.beta * t / (y * y) + k.gamma * tm1 / (ym1 * ym1)
                + k.delta * t * tm1 / (ymt * ymt))
}

/// Distance below which `y` or `t` counts as sitting on a singular value.
pub const SINGULAR_GUARD: f64 = 1e-12;

/// `y'' - RHS(y, y', t)`.
pub fn pvi_residual(
    y: Complex64,
    y1: Complex64,
    y2: Complex64,
    t: Complex64,
    k: &PViConstants<Complex64>,
) -> Result<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let near = |a: Complex64, b: Complex64| (a - b).norm() < SINGULAR_GUARD;
    if near(t, 0.0.into()) || near(t, one) {
        return Err(CoreError::Singularity {
            t: t.to_string(),
            what: "t at a fixed singular point".into(),
        });
    }
    if near(y, 0.0.into()) || near(y, one) || near(y, t) {
        return Err(CoreError::Singularity {
            t: t.to_string(),
            what: "y at a singular value".into(),
        });
    }
    Ok(y2 - pvi_rhs_complex(y, y1, t, k))
}

/// Symbolic `y'' - RHS(y, y', t)`.
pub fn pvi_residual_symbolic(y: &Rf, y1: &Rf, y2: &Rf, k: &PViConstants<Rf>) -> Result<Rf> {
    let t = t();
    let one = c(1);
    let ym1 = y - &one;
    let ymt = y - &t;
    let tm1 = &t - &one;
    let recip = |x: &Rf| x.inv();
    let first = fr(1, 2) * (recip(y)? + recip(&ym1)? + recip(&ymt)?) * (y1 * y1);
    let second = (recip(&t)? + recip(&tm1)? + recip(&ymt)?) * y1;
    let bracket = &k.alpha
        + &k.beta * &t * recip(&(y * y))?
        + &k.gamma * &tm1 * recip(&(&ym1 * &ym1))?
        + &k.delta * &t * &tm1 * recip(&(&ymt * &ymt))?;
    let third = y * &ym1 * &ymt * recip(&(&t * &t * &tm1 * &tm1))? * bracket;
    Ok(y2 - (first - second + third))
}

/// Coefficients `a1(x), a2(x)` of the scalar Fuchsian equation, with `H`
/// inserted.
pub fn fuchsian_coeffs(pv: &ParamVec) -> (Rf, Rf) {
    fuchsian_coeffs_scaled(pv, 1)
}

/// [`fuchsian_coeffs`] with the `q(q-1)p` term of `a2` multiplied by `scale`.
pub fn fuchsian_coeffs_scaled(pv: &ParamVec, scale: i64) -> (Rf, Rf) {
    let [k0, k1, kt, kinf, rho] = pv.kappas();
    let (x, q, p, t) = (v(Var::X), q(), p(), t());
    let h = hamiltonian_h(pv);
    let a1 = (c(1) - &k0) / &x + (c(1) - &k1) / (&x - c(1)) + (c(1) - &kt) / (&x - &t)
        - c(1) / (&x - &q);
    let brace = -(&t * (&t - c(1)) * &h) / (&x - &t) + c(scale) * &q * (&q - c(1)) * &p / (&x - &q)
        + &rho * (&kinf + &rho);
    let a2 = brace / (&x * (&x - c(1)));
    (a1, a2)
}

/// Coefficient of `1/(x - at)` in the partial-fraction expansion of `f` in
/// `x`, assuming the pole there is at most simple.
pub fn residue_at(f: &Rf, at: &Rf) -> Result<Rf> {
    let x = v(Var::X);
    let g = f * (&x - at);
    Ok(g.substitute(&Substitution::new().with(Var::X, at.clone()))?)
}

/// `Res_{x=inf}(f dx)`, minus the coefficient of `1/x` at infinity.
pub fn residue_at_infinity(f: &Rf) -> Rf {
    let num = f.numer().coefficients_in(Var::X);
    let den = f.denom().coefficients_in(Var::X);
    let (dn, dd) = (num.len() as i64 - 1, den.len() as i64 - 1);
    // f = x^(dn - dd) * (sum num_k x^(k - dn)) / (sum den_k x^(k - dd)); expand
    // in 1/x far enough to reach x^-1.
    let shift = dn - dd;
    if shift < -1 {
        return Rf::zero();
    }
    let needed = (shift + 1) as usize;
    let lead = Rf::from_poly(den[dd as usize].clone());
    // Series of num/den in w = 1/x: coefficients s_0..s_needed.
    let nw = |k: usize| -> Rf {
        if k as i64 > dn {
            Rf::zero()
        } else {
            Rf::from_poly(num[(dn as usize) - k].clone())
        }
    };
    let dw = |k: usize| -> Rf {
        if k as i64 > dd {
            Rf::zero()
        } else {
            Rf::from_poly(den[(dd as usize) - k].clone())
        }
    };
    let mut s: Vec<Rf> = Vec::with_capacity(needed + 1);
    for k in 0..=needed {
        let mut acc = nw(k);
        for (j, sj) in s.iter().enumerate() {
            acc = acc - dw(k - j) * sj;
        }
        s.push(acc / &lead);
    }
    -s[needed].clone()
}

/// Closed forms of the residues of `a2 dx` at `x = 0, 1, t, q, inf`.
pub fn expected_a2_residues(pv: &ParamVec) -> [Rf; 5] {
    let [_, _, _, kinf, rho] = pv.kappas();
    let h = hamiltonian_h(pv);
    let (q, p, t) = (q(), p(), t());
    let rk = &rho * (&kinf + &rho);
    [
        -((&t - c(1)) * &h - (&q - c(1)) * &p + &rk),
        &t * &h - &q * &p + &rk,
        -h,
        p,
        Rf::zero(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use pvi_field::rat;

    #[test]
    fn alpha_to_kappa_is_a_reordering() {
        let pv = ParamVec::symbolic();
        let k = pv.convert(ParamKind::Kappa);
        let a = pv.alphas();
        assert_eq!(k.values()[2], a[0]);
        assert_eq!(k.values()[3], a[1]);
        assert_eq!(k.values()[4], a[2]);
        assert_eq!(k.values()[1], a[3]);
        assert_eq!(k.values()[0], a[4]);
    }

    #[test]
    fn zero_epsilon_is_alpha_unit() {
        let pv = ParamVec::epsilon([c(0), c(0), c(0), c(0)]);
        let a = pv.alphas();
        assert!(a[0].is_one());
        assert!(a[1..].iter().all(Rf::is_zero));
    }

    #[test]
    fn kappa_infinity_one_gives_alpha_half() {
        let pv = ParamVec::kappa([c(0), c(0), c(0), c(1), c(0)]).unwrap();
        assert_eq!(pvi_constants(&pv).alpha, fr(1, 2));
    }

    #[test]
    fn all_kappa_zero_constants() {
        let z = c(0);
        let k = pvi_constants_from_kappa(&z, &z, &z, &z);
        assert_eq!(k.alpha, c(0));
        assert_eq!(k.beta, c(0));
        assert_eq!(k.gamma, c(0));
        assert_eq!(k.delta, fr(1, 2));
    }

    #[test]
    fn invalid_alpha_rejected() {
        assert!(ParamVec::alpha([c(1), c(1), c(0), c(0), c(0)]).is_err());
    }

    #[test]
    fn h_vanishes_when_p_and_rho_vanish() {
        let pv = ParamVec::alpha([fr(1, 3), fr(1, 3), c(0), fr(1, 6), fr(1, 6)]).unwrap();
        let h = hamiltonian_h(&pv);
        let h0 = h.substitute(&Substitution::new().with(Var::P, c(0))).unwrap();
        assert!(h0.is_zero());
    }

    #[test]
    fn delta_of_t_is_one_and_parameters_constant() {
        assert!(delta_derivation(&t()).is_one());
        assert!(delta_derivation(&v(Var::A3)).is_zero());
    }

    #[test]
    fn bracket_orientation() {
        assert!(poisson(&p(), &q()).is_one());
        assert_eq!(poisson(&-p(), &(q() - t())), c(-1));
    }

    #[test]
    fn residual_zero_when_y2_is_rhs() {
        let pv = ParamVec::from_alpha_tail([rat(1, 5), rat(1, 10), rat(1, 8), rat(1, 40)]);
        let k = pvi_constants(&pv).to_complex().unwrap();
        let (y, y1, t) = (
            Complex64::new(0.3, 0.2),
            Complex64::new(-1.1, 0.4),
            Complex64::new(2.5, 0.0),
        );
        let y2 = pvi_rhs_complex(y, y1, t, &k);
        assert!(pvi_residual(y, y1, y2, t, &k).unwrap().norm() < 1e-14);
        assert!(pvi_residual(Complex64::new(1.0, 0.0), y1, y2, t, &k).is_err());
    }

    #[test]
    fn residue_at_infinity_of_simple_forms() {
        let x = v(Var::X);
        assert_eq!(residue_at_infinity(&(c(1) / &x)), c(-1));
        assert!(residue_at_infinity(&(c(1) / (&x * &x))).is_zero());
        assert_eq!(residue_at_infinity(&(&x / (&x * &x - c(1)))), c(-1));
        // x^2/(x - 1) = x + 1 + 1/(x - 1): the 1/x coefficient is 1.
        assert_eq!(residue_at_infinity(&(&x * &x / (&x - c(1)))), c(-1));
    }
}
