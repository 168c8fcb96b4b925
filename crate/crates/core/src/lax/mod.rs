//! The `so(8)[z, 1/z]` Lax pair `(z d/dz + M, d/dt - B)` and the loop-group
//! gauge matrices realizing the Bäcklund transformations on it.
//!
//! Matrix positions in the public helpers ([`unit`], template read-offs) are
//! 1-based, matching the usual matrix-unit notation `E_ij`; the underlying
//! [`LoopMatrix`] accessors are 0-based.

pub mod frobenius;
pub mod matrix;

use std::sync::{Arc, OnceLock};

pub use matrix::{LaurentPoly, LoopMatrix, N};

use pvi_field::{RootExtElement, RootSystem, Scalar, Var};

use crate::backlund::{alpha, reflection_map, BirationalMap};
use crate::expr::{c, fr, p, q, t, Rf};
use crate::hamiltonian::HamiltonianSystem;
use crate::report::{Check, Report};
use crate::weyl::{
    epsilon_in_alphas, root_action, sigma, AffineForm, AffineRootVec, Generator, CARTAN,
};
use crate::{CoreError, Result};

pub type RfMatrix = LoopMatrix<Rf>;
pub type ExtMatrix = LoopMatrix<RootExtElement>;

/// `E_ij` times `z^(half_exp/2)`, 1-based.
pub fn unit<T: Scalar>(i: usize, j: usize, half_exp: i32) -> LoopMatrix<T> {
    LoopMatrix::unit(i - 1, j - 1, T::one(), half_exp)
}

fn put<T: Scalar>(m: &mut LoopMatrix<T>, i: usize, j: usize, x: T, half_exp: i32) {
    m.set(i - 1, j - 1, LaurentPoly::monomial(x, half_exp));
}

fn scaled<T: Scalar>(m: &LoopMatrix<T>, x: &T) -> LoopMatrix<T> {
    m.scale(x)
}

/// Chevalley generator `E_j`.
pub fn e<T: Scalar>(j: usize) -> LoopMatrix<T> {
    match j {
        0 => unit(8, 2, 2).sub(&unit(7, 1, 2)),
        1 => unit(1, 2, 0).sub(&unit(7, 8, 0)),
        2 => unit(2, 3, 0).sub(&unit(6, 7, 0)),
        3 => unit(3, 4, 0).sub(&unit(5, 6, 0)),
        4 => unit(3, 5, 0).sub(&unit(4, 6, 0)),
        _ => panic!("no Chevalley generator E{j}"),
    }
}

/// Chevalley generator `F_j`.
pub fn f<T: Scalar>(j: usize) -> LoopMatrix<T> {
    match j {
        0 => unit(2, 8, -2).sub(&unit(1, 7, -2)),
        1 => unit(2, 1, 0).sub(&unit(8, 7, 0)),
        2 => unit(3, 2, 0).sub(&unit(7, 6, 0)),
        3 => unit(4, 3, 0).sub(&unit(6, 5, 0)),
        4 => unit(5, 3, 0).sub(&unit(6, 4, 0)),
        _ => panic!("no Chevalley generator F{j}"),
    }
}

/// `H_j = [E_j, F_j]`.
pub fn h<T: Scalar>(j: usize) -> LoopMatrix<T> {
    e::<T>(j).commutator(&f(j))
}

/// `H(a) = sum a_i (E_ii - E_{9-i,9-i})`.
pub fn h_vec<T: Scalar>(a: &[T; 4]) -> LoopMatrix<T> {
    let mut m = LoopMatrix::zero();
    for (i, x) in a.iter().enumerate() {
        m.set(i, i, LaurentPoly::constant(x.clone()));
        m.set(N - 1 - i, N - 1 - i, LaurentPoly::constant(x.neg()));
    }
    m
}

/// The displayed `H_j` as vectors for `H(a)`.
pub fn h_coordinates(j: usize) -> [i64; 4] {
    match j {
        0 => [-1, -1, 0, 0],
        1 => [1, -1, 0, 0],
        2 => [0, 1, -1, 0],
        3 => [0, 0, 1, -1],
        4 => [0, 0, 1, 1],
        _ => panic!("no Cartan generator H{j}"),
    }
}

/// The spectral matrix `M`, entered as displayed.
pub fn build_m() -> RfMatrix {
    let [e1, e2, e3, e4] = epsilon_in_alphas();
    let mut m = h_vec(&[e1, e2, e3, e4]);
    for (i, j, x, k) in [
        (1, 2, c(1), 0),
        (2, 3, -p(), 0),
        (2, 4, c(-1), 0),
        (2, 5, c(-1), 0),
        (3, 4, q() - c(1), 0),
        (3, 5, q(), 0),
        (4, 6, -q(), 0),
        (4, 7, c(1), 0),
        (5, 6, c(1) - q(), 0),
        (5, 7, c(1), 0),
        (6, 1, c(-1), 2),
        (6, 7, p(), 0),
        (7, 1, t() - q(), 2),
        (7, 8, c(-1), 0),
        (8, 2, q() - t(), 2),
        (8, 3, c(1), 2),
    ] {
        put(&mut m, i, j, x, k);
    }
    m
}

/// `M` rebuilt from its Borel-subalgebra expansion.
pub fn build_m_borel() -> RfMatrix {
    let eps = epsilon_in_alphas();
    let e2 = e::<Rf>(2);
    h_vec(&eps)
        .add(&scaled(&e(0), &(q() - t())))
        .add(&e(1))
        .sub(&scaled(&e2, &p()))
        .add(&scaled(&e(3), &(q() - c(1))))
        .add(&scaled(&e(4), &q()))
        .add(&e::<Rf>(0).commutator(&e2))
        .add(&e::<Rf>(3).commutator(&e2))
        .add(&e::<Rf>(4).commutator(&e2))
}

/// The entries `x_j`, `y_j`, `u_j` of `B`; `y` holds `(y1, y3, y4)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BCoefficients {
    pub x: [Rf; 4],
    pub y: [Rf; 3],
    pub u: [Rf; 4],
}

impl BCoefficients {
    pub fn symbolic() -> Self {
        let (q, p, t) = (q(), p(), t());
        let a = |j| alpha(j);
        let tt = &t * (&t - c(1));
        let x = [
            (&q - &t) / &tt,
            -((&q - &t) * &p + a(1) + a(2)) / &tt,
            -(&q / &t),
            -((&q - c(1)) / (&t - c(1))),
        ];
        let y = [c(1) / &tt, -(c(1) / &t), -(c(1) / (&t - c(1)))];
        let qq1p = &q * (&q - c(1)) * &p;
        let k04 = (a(0) + a(4) - c(1)) * fr(1, 2);
        let u = [
            -&qq1p - a(2) * &q + (a(0) - a(1) - c(1)) * fr(1, 2) * &t - &k04,
            -&qq1p - (a(1) + a(2)) * &q + (a(0) + a(1) - c(1)) * fr(1, 2) * &t - &k04,
            (c(2) * &q - c(1)) * (&q - &t) * &p
                + (a(1) + c(2) * a(2)) * &q
                + (a(3) + a(4)) * fr(1, 2) * &t
                + &k04,
            -((&q - &t) * &p) + (a(3) - a(4)) * fr(1, 2) * &t + &k04,
        ]
        .map(|n| n / &tt);
        BCoefficients { x, y, u }
    }
}

/// The deformation matrix `B`, entered as displayed.
pub fn build_b_from(k: &BCoefficients) -> RfMatrix {
    let [x1, x2, x3, x4] = k.x.clone();
    let [y1, y3, y4] = k.y.clone();
    let [u1, u2, u3, u4] = k.u.clone();
    let mut b = RfMatrix::zero();
    for (i, j, x, h) in [
        (1, 1, u1.clone(), 0),
        (1, 2, x1.clone(), 0),
        (1, 3, y1.clone(), 0),
        (2, 2, u2.clone(), 0),
        (2, 3, x2.clone(), 0),
        (2, 4, -&y3, 0),
        (2, 5, -&y4, 0),
        (3, 3, u3.clone(), 0),
        (3, 4, x3.clone(), 0),
        (3, 5, x4.clone(), 0),
        (4, 4, u4.clone(), 0),
        (4, 6, -&x4, 0),
        (4, 7, y4, 0),
        (5, 5, -&u4, 0),
        (5, 6, -&x3, 0),
        (5, 7, y3, 0),
        (6, 6, -&u3, 0),
        (6, 7, -&x2, 0),
        (6, 8, -&y1, 0),
        (7, 1, c(-1), 2),
        (7, 7, -&u2, 0),
        (7, 8, -&x1, 0),
        (8, 2, c(1), 2),
        (8, 8, -&u1, 0),
    ] {
        put(&mut b, i, j, x, h);
    }
    b
}

pub fn build_b() -> RfMatrix {
    build_b_from(&BCoefficients::symbolic())
}

/// `B` rebuilt from its Borel-subalgebra expansion.
pub fn build_b_borel() -> RfMatrix {
    let k = BCoefficients::symbolic();
    let e2 = e::<Rf>(2);
    let mut out = h_vec(&k.u).add(&e(0));
    for (j, x) in k.x.iter().enumerate() {
        out = out.add(&scaled(&e(j + 1), x));
    }
    for (j, y) in [1, 3, 4].into_iter().zip(k.y.iter()) {
        out = out.add(&scaled(&e::<Rf>(j).commutator(&e2), y));
    }
    out
}

/// `d(M) + z dB/dz - [B, M]` for a derivation `d` acting on entries.
pub fn zero_curvature_residual_with(
    m: &RfMatrix,
    b: &RfMatrix,
    d: &(dyn Fn(&Rf) -> Rf + Sync),
) -> RfMatrix {
    m.map(d).add(&b.z_deriv()).sub(&b.commutator(m))
}

/// The compatibility residual with `q, p` evolving by the Hamiltonian flow.
pub fn zero_curvature_residual() -> RfMatrix {
    let sys = HamiltonianSystem::symbolic();
    zero_curvature_residual_with(&build_m(), &build_b(), &|x| sys.delta(x))
}

/// Solves the compatibility condition for `(dq/dt, dp/dt)`: the `(3,4)` and
/// `(2,3)` entries are linear in them, and the remaining entries must then
/// vanish.
pub fn converse_solve() -> Result<(Rf, Rf)> {
    let (m, b) = (build_m(), build_b());
    let explicit = zero_curvature_residual_with(&m, &b, &|x| x.differentiate(Var::T));
    let qdot = -explicit.get(2, 3).coeff_int(0);
    let pdot = explicit.get(1, 2).coeff_int(0);
    let full = zero_curvature_residual_with(&m, &b, &|x| {
        x.differentiate(Var::T) + &qdot * x.differentiate(Var::Q) + &pdot * x.differentiate(Var::P)
    });
    if !full.is_zero() {
        return Err(CoreError::Invalid(format!(
            "compatibility not solved by the extracted flow at {:?}",
            full.nonzero_positions()
        )));
    }
    Ok((qdot, pdot))
}

/// The coefficient `g_k` in `G_k = 1 + g_k F_k`.
pub fn g_coefficient(k: usize) -> Rf {
    match k {
        0 => alpha(0) / (q() - t()),
        1 => alpha(1),
        2 => -(alpha(2) / p()),
        3 => alpha(3) / (q() - c(1)),
        4 => alpha(4) / q(),
        _ => panic!("no gauge matrix G{k}"),
    }
}

/// `(1 + g F_k, 1 - g F_k)`; the pair are inverse since `F_k^2 = 0`.
pub fn gauge_g_with(k: usize, g: &Rf) -> (RfMatrix, RfMatrix) {
    let fk = scaled(&f::<Rf>(k), g);
    let one = RfMatrix::identity();
    (one.add(&fk), one.sub(&fk))
}

pub fn gauge_g(k: usize) -> RfMatrix {
    gauge_g_with(k, &g_coefficient(k)).0
}

pub fn gauge_g_inv(k: usize) -> RfMatrix {
    gauge_g_with(k, &g_coefficient(k)).1
}

/// `(m(M) - (G M G^-1 - z G_z G^-1), m(B) - (G B G^-1 + d(G) G^-1))`.
pub fn gauge_residual_with(
    map: &BirationalMap,
    g: &RfMatrix,
    g_inv: &RfMatrix,
) -> Result<(RfMatrix, RfMatrix)> {
    let sys = HamiltonianSystem::symbolic();
    let (m, b) = (build_m(), build_b());
    let mapped_m = m.try_map_into(|x| map.apply(x))?;
    let mapped_b = b.try_map_into(|x| map.apply(x))?;
    let gm = g.mul(&m).mul(g_inv).sub(&g.z_deriv().mul(g_inv));
    let gb = g
        .mul(&b)
        .mul(g_inv)
        .add(&g.map(|x| sys.delta(x)).mul(g_inv));
    Ok((mapped_m.sub(&gm), mapped_b.sub(&gb)))
}

/// Both compatibility residuals for `s_k` and `G_k`.
pub fn gauge_residual_s(k: usize) -> Result<(RfMatrix, RfMatrix)> {
    let (g, gi) = gauge_g_with(k, &g_coefficient(k));
    gauge_residual_with(&reflection_map(k), &g, &gi)
}

fn rotation_slot(k: usize) -> usize {
    match k {
        1 => 0,
        3 => 1,
        4 => 2,
        _ => panic!("no rotation r{k}"),
    }
}

/// Name and radicand of the square root needed by `Gamma_k`.
pub fn radical(k: usize) -> (&'static str, Rf) {
    match k {
        1 => ("sqrt(t(t-1))", t() * (t() - c(1))),
        3 => ("sqrt(-t)", -t()),
        4 => ("sqrt(1-t)", c(1) - t()),
        _ => panic!("no rotation r{k}"),
    }
}

/// The one-root system adjoined for `Gamma_k`.
pub fn root_system(k: usize) -> Arc<RootSystem> {
    static SYSTEMS: [OnceLock<Arc<RootSystem>>; 3] = [const { OnceLock::new() }; 3];
    SYSTEMS[rotation_slot(k)]
        .get_or_init(|| {
            let (name, square) = radical(k);
            RootSystem::new([(name, square)]).expect("nonzero radicand")
        })
        .clone()
}

fn the_root(k: usize) -> (Arc<RootSystem>, RootExtElement, RootExtElement) {
    let sys = root_system(k);
    let r = RootExtElement::root(&sys, radical(k).0).expect("declared root");
    let ri = r.inv().expect("root is invertible");
    (sys, r, ri)
}

fn ext(sys: &Arc<RootSystem>, x: Rf) -> RootExtElement {
    RootExtElement::rational_in(sys, x)
}

/// Embeds a rational matrix into the root system of `Gamma_k`.
pub fn lift(m: &RfMatrix, sys: &Arc<RootSystem>) -> ExtMatrix {
    m.map_into(|x| ext(sys, x.clone()))
}

/// `Gamma_k` as displayed.
pub fn gamma_explicit(k: usize) -> ExtMatrix {
    let (_, r, ri) = the_root(k);
    let mr = |x: &RootExtElement, f: Rf| x.mul_rational(&f);
    let (q, t) = (q(), t());
    let entries: Vec<(usize, usize, RootExtElement, i32)> = match k {
        1 => vec![
            (1, 8, ri.clone(), -2),
            (2, 2, mr(&ri, &q - &t), 0),
            (2, 3, ri.clone(), 0),
            (3, 3, mr(&r, -(c(1) / (&q - &t))), 0),
            (4, 5, mr(&ri, -t.clone()), 0),
            (5, 4, mr(&r, -(c(1) / &t)), 0),
            (6, 6, mr(&ri, -(&q - &t)), 0),
            (6, 7, ri.clone(), 0),
            (7, 7, mr(&r, c(1) / (&q - &t)), 0),
            (8, 1, r.clone(), 2),
        ],
        3 => vec![
            (1, 4, ri.clone(), -1),
            (2, 6, mr(&ri, -q.clone()), -1),
            (2, 7, ri.clone(), -1),
            (3, 7, mr(&r, c(1) / &q), -1),
            (4, 1, r.clone(), 1),
            (5, 8, ri.clone(), -1),
            (6, 2, mr(&ri, q.clone()), 1),
            (6, 3, ri.clone(), 1),
            (7, 3, mr(&r, -(c(1) / &q)), 1),
            (8, 5, r.clone(), 1),
        ],
        4 => vec![
            (1, 5, ri.clone(), -1),
            (2, 6, mr(&ri, c(1) - &q), -1),
            (2, 7, ri.clone(), -1),
            (3, 7, mr(&r, c(1) / (c(1) - &q)), -1),
            (4, 8, ri.clone(), -1),
            (5, 1, r.clone(), 1),
            (6, 2, mr(&ri, c(1) - &q), 1),
            (6, 3, -&ri, 1),
            (7, 3, mr(&r, c(1) / (c(1) - &q)), 1),
            (8, 4, r.clone(), 1),
        ],
        _ => panic!("no rotation r{k}"),
    };
    let mut m = ExtMatrix::zero();
    for (i, j, x, h) in entries {
        put(&mut m, i, j, x, h);
    }
    m
}

/// The diagonal scaling vector `a_k` in `D(a_k)`.
pub fn scaling_vector(k: usize) -> [RootExtElement; 4] {
    let (_, r, ri) = the_root(k);
    let mr = |x: &RootExtElement, f: Rf| x.mul_rational(&f);
    let (q, t) = (q(), t());
    match k {
        1 => [
            ri.clone(),
            mr(&ri, &q - &t),
            mr(&r, -(c(1) / (&q - &t))),
            mr(&ri, -t),
        ],
        3 => [ri.clone(), mr(&ri, q.clone()), mr(&r, c(1) / &q), -&r],
        4 => [
            ri.clone(),
            mr(&ri, &q - c(1)),
            mr(&r, c(1) / (c(1) - &q)),
            -&ri,
        ],
        _ => panic!("no rotation r{k}"),
    }
}

/// `D(a) = diag(a1, a2, a3, a4, 1/a4, 1/a3, 1/a2, 1/a1)`.
pub fn d_matrix<T: Scalar>(a: &[T; 4]) -> Result<LoopMatrix<T>> {
    let mut m = LoopMatrix::zero();
    for (i, x) in a.iter().enumerate() {
        m.set(i, i, LaurentPoly::constant(x.clone()));
        m.set(N - 1 - i, N - 1 - i, LaurentPoly::constant(x.inv()?));
    }
    Ok(m)
}

/// The denominator `c_k` in `exp(E_2 / c_k)`.
pub fn unipotent_denominator(k: usize) -> Rf {
    match k {
        1 => q() - t(),
        3 => q(),
        4 => q() - c(1),
        _ => panic!("no rotation r{k}"),
    }
}

/// Doubled `z`-exponents of `z^(-varpi_k)` down the diagonal.
fn neg_weight_exponents(k: usize) -> [i32; N] {
    match k {
        1 => [-2, 0, 0, 0, 0, 0, 0, 2],
        3 => [-1, -1, -1, 1, -1, 1, 1, 1],
        4 => [-1, -1, -1, -1, 1, 1, 1, 1],
        _ => panic!("no rotation r{k}"),
    }
}

/// `z^(-varpi_k)`, or `z^(varpi_k)` when `inverse` is set.
pub fn z_weight<T: Scalar>(k: usize, inverse: bool) -> LoopMatrix<T> {
    let ex = neg_weight_exponents(k);
    LoopMatrix::diag(std::array::from_fn(|i| {
        LaurentPoly::monomial(T::one(), if inverse { -ex[i] } else { ex[i] })
    }))
}

/// The transpositions of the permutation in `C_k`, 1-based.
fn c_transpositions(k: usize) -> &'static [(usize, usize)] {
    match k {
        1 => &[(1, 8), (4, 5)],
        3 => &[(1, 4), (2, 6), (3, 7), (5, 8)],
        4 => &[(1, 5), (2, 6), (3, 7), (4, 8)],
        _ => panic!("no rotation r{k}"),
    }
}

/// `S_sigma`, whose row `i` has a one in column `sigma(i)`.
pub fn permutation_matrix<T: Scalar>(transpositions: &[(usize, usize)]) -> LoopMatrix<T> {
    let mut s: [usize; N] = std::array::from_fn(|i| i);
    for &(a, b) in transpositions {
        s.swap(a - 1, b - 1);
    }
    LoopMatrix::from_fn(|i, j| {
        if s[i] == j {
            LaurentPoly::one()
        } else {
            LaurentPoly::zero()
        }
    })
}

/// `C_k`.
pub fn c_matrix<T: Scalar>(k: usize) -> LoopMatrix<T> {
    let s = permutation_matrix::<T>(c_transpositions(k));
    if k == 1 {
        return s;
    }
    let signs = [1, -1, 1, -1, -1, 1, -1, 1];
    let d = LoopMatrix::diag(signs.map(|x| {
        if x > 0 {
            LaurentPoly::one()
        } else {
            LaurentPoly::one().neg()
        }
    }));
    d.mul(&s)
}

/// `R_k = z^(-varpi_k) C_k` and its inverse.
pub fn rotation_lift<T: Scalar>(k: usize) -> (LoopMatrix<T>, LoopMatrix<T>) {
    let c = c_matrix::<T>(k);
    let r = z_weight::<T>(k, false).mul(&c);
    let r_inv = c.transpose().mul(&z_weight(k, true));
    (r, r_inv)
}

fn unipotent(k: usize, sign: i64) -> ExtMatrix {
    let sys = root_system(k);
    let x = ext(&sys, c(sign) / unipotent_denominator(k));
    ExtMatrix::identity().add(&e::<RootExtElement>(2).scale(&x))
}

/// `D(a_k) exp(E_2 / c_k) z^(-varpi_k) C_k`.
pub fn gamma_factored(k: usize) -> Result<ExtMatrix> {
    Ok(d_matrix(&scaling_vector(k))?
        .mul(&unipotent(k, 1))
        .mul(&rotation_lift(k).0))
}

/// `Gamma_k^-1` from the factors, each inverted in closed form.
pub fn gamma_inverse(k: usize) -> Result<ExtMatrix> {
    let inv_a = scaling_vector(k)
        .iter()
        .map(|x| x.inv())
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let inv_a: [RootExtElement; 4] = inv_a.try_into().expect("four entries");
    Ok(rotation_lift(k)
        .1
        .mul(&unipotent(k, -1))
        .mul(&d_matrix(&inv_a)?))
}

/// `Delta` applied to a root-extension entry.
pub fn delta_ext(x: &RootExtElement) -> RootExtElement {
    let sys = HamiltonianSystem::symbolic();
    let mut out = x.differentiate(Var::T);
    let dq = x.differentiate(Var::Q);
    if !dq.is_zero() {
        out = &out + &dq.mul_rational(sys.qdot());
    }
    let dp = x.differentiate(Var::P);
    if !dp.is_zero() {
        out = &out + &dp.mul_rational(&sys.pdot());
    }
    out
}

/// `Gamma M Gamma^-1 - z Gamma_z Gamma^-1` for the displayed `Gamma_k`.
pub fn gamma_transform_m(k: usize) -> Result<ExtMatrix> {
    let g = gamma_explicit(k);
    let gi = gamma_inverse(k)?;
    let m = lift(&build_m(), &root_system(k));
    Ok(g.mul(&m).mul(&gi).sub(&g.z_deriv().mul(&gi)))
}

/// Reads `(eps', q', p', t')` off a matrix that must have the shape of `M`.
pub fn read_template(mt: &RfMatrix) -> Result<BirationalMap> {
    let template = build_m();
    let mismatch = |what: String| CoreError::TemplateMismatch(what);
    for i in 0..N {
        for j in 0..N {
            let (a, b) = (template.get(i, j), mt.get(i, j));
            if b.terms().any(|(k, _)| a.coeff(k).is_none()) {
                return Err(mismatch(format!("entry ({}, {}) outside the pattern", i + 1, j + 1)));
            }
        }
    }
    for (i, j, x, h) in [
        (1, 2, 1, 0),
        (2, 4, -1, 0),
        (2, 5, -1, 0),
        (4, 7, 1, 0),
        (5, 7, 1, 0),
        (7, 8, -1, 0),
        (6, 1, -1, 2),
        (8, 3, 1, 2),
    ] {
        if *mt.get(i - 1, j - 1) != LaurentPoly::monomial(c(x), h) {
            return Err(mismatch(format!("constant entry ({i}, {j}) changed")));
        }
    }
    let at = |i: usize, j: usize, h: i32| -> Rf {
        mt.get(i - 1, j - 1).coeff(h).cloned().unwrap_or_else(Rf::zero)
    };
    let new_q = at(3, 4, 0) + c(1);
    let new_p = -at(2, 3, 0);
    let new_t = at(7, 1, 2) + &new_q;
    let redundant = [
        ("(3,5)", at(3, 5, 0), new_q.clone()),
        ("(4,6)", at(4, 6, 0), -&new_q),
        ("(5,6)", at(5, 6, 0), c(1) - &new_q),
        ("(6,7)", at(6, 7, 0), new_p.clone()),
        ("(8,2)", at(8, 2, 2), &new_q - &new_t),
    ];
    for (pos, got, want) in redundant {
        if got != want {
            return Err(mismatch(format!("entry {pos} disagrees: {got} vs {want}")));
        }
    }
    let eps: Vec<Rf> = (1..=4).map(|i| at(i, i, 0)).collect();
    for i in 1..=4 {
        if at(9 - i, 9 - i, 0) != -&eps[i - 1] {
            return Err(mismatch(format!("diagonal entry ({0}, {0}) not antisymmetric", 9 - i)));
        }
    }
    let roots_rf = [
        c(1) - &eps[0] - &eps[1],
        &eps[0] - &eps[1],
        &eps[1] - &eps[2],
        &eps[2] - &eps[3],
        &eps[2] + &eps[3],
    ];
    let mut forms = Vec::with_capacity(5);
    for (j, r) in roots_rf.iter().enumerate() {
        forms.push(AffineForm::from_rf(r).ok_or_else(|| {
            mismatch(format!("alpha{j} image {r} is not affine in the parameters"))
        })?);
    }
    Ok(BirationalMap {
        roots: AffineRootVec {
            forms: forms.try_into().expect("five forms"),
        },
        q: new_q,
        p: new_p,
        t: new_t,
    })
}

/// `r_k` read off the gauge transform of `M` by `Gamma_k`.
pub fn derive_r_map(k: usize) -> Result<BirationalMap> {
    let mt = gamma_transform_m(k)?;
    if mt.entries().iter().any(LaurentPoly::has_half_powers) {
        return Err(CoreError::TemplateMismatch("half-integer powers of z survive".into()));
    }
    let mt = mt.try_map_into(|x| {
        x.as_rational()
            .cloned()
            .ok_or_else(|| CoreError::TemplateMismatch(format!("irrational entry {x}")))
    })?;
    let map = read_template(&mt)?;
    let expected = root_action(Generator::R(k), &AffineRootVec::identity());
    if map.roots != expected {
        return Err(CoreError::TemplateMismatch(format!(
            "root images of r{k} are not the diagram permutation"
        )));
    }
    if map.t != t() {
        return Err(CoreError::TemplateMismatch(format!("r{k} moves t to {}", map.t)));
    }
    Ok(map)
}

/// Cached [`derive_r_map`].
pub fn derived_r_map(k: usize) -> Result<BirationalMap> {
    static MAPS: [OnceLock<Result<BirationalMap>>; 3] = [const { OnceLock::new() }; 3];
    MAPS[rotation_slot(k)]
        .get_or_init(|| derive_r_map(k))
        .clone()
}

/// Both compatibility residuals for a map and a gauge matrix over a root
/// extension.
pub fn gauge_residual_ext(
    sys: &Arc<RootSystem>,
    map: &BirationalMap,
    g: &ExtMatrix,
    g_inv: &ExtMatrix,
) -> Result<(ExtMatrix, ExtMatrix)> {
    let (m, b) = (build_m(), build_b());
    let mapped_m = lift(&m.try_map_into(|x| map.apply(x))?, sys);
    let mapped_b = lift(&b.try_map_into(|x| map.apply(x))?, sys);
    let (m, b) = (lift(&m, sys), lift(&b, sys));
    let gm = g.mul(&m).mul(g_inv).sub(&g.z_deriv().mul(g_inv));
    let gb = g.mul(&b).mul(g_inv).add(&g.map(delta_ext).mul(g_inv));
    Ok((mapped_m.sub(&gm), mapped_b.sub(&gb)))
}

/// Both compatibility residuals for `r_k` and `Gamma_k`.
pub fn gauge_residual_r(k: usize) -> Result<(ExtMatrix, ExtMatrix)> {
    gauge_residual_ext(
        &root_system(k),
        &derived_r_map(k)?,
        &gamma_explicit(k),
        &gamma_inverse(k)?,
    )
}

/// `S_k = exp(-E_k) exp(F_k) exp(-E_k)` and its inverse.
pub fn weyl_lift_s(k: usize) -> (RfMatrix, RfMatrix) {
    let one = RfMatrix::identity();
    let (ek, fk) = (e::<Rf>(k), f::<Rf>(k));
    let s = one.sub(&ek).mul(&one.add(&fk)).mul(&one.sub(&ek));
    let s_inv = one.add(&ek).mul(&one.sub(&fk)).mul(&one.add(&ek));
    (s, s_inv)
}

/// `S_k` is in the loop group and acts on the Cartan generators as the
/// reflection `H_j -> H_j - a_kj H_k`.
pub fn weyl_lift_check(k: usize) -> Report {
    let mut report = Report::new();
    let (s, s_inv) = weyl_lift_s(k);
    report.push(Check::new(
        "gauge-s",
        format!("S{k} in the loop group"),
        s.in_group() && s.mul(&s_inv) == RfMatrix::identity(),
        format!("{} nonzero coefficients", s.term_count()),
        "lift of s_k to the loop group",
    ));
    for j in 0..5 {
        let got = s.mul(&h(j)).mul(&s_inv);
        let want = h::<Rf>(j).sub(&h::<Rf>(k).scale(&c(CARTAN[k][j])));
        report.push(Check::new(
            "gauge-s",
            format!("Ad(S{k}) H{j} = H{j} - a{k}{j} H{k}"),
            got == want,
            format!("a{k}{j} = {}", CARTAN[k][j]),
            "lift of s_k to the loop group",
        ));
    }
    report
}

/// `Ad(R) E_j = E_sigma(j)` and `Ad(R) F_j = F_sigma(j)` for an explicit lift.
pub fn diagram_automorphism_check_with(k: usize, r: &RfMatrix, r_inv: &RfMatrix) -> Report {
    let s = sigma(k);
    let mut report = Report::new();
    for j in 0..5 {
        for (kind, x, y) in [
            ("E", e::<Rf>(j), e::<Rf>(s[j])),
            ("F", f::<Rf>(j), f::<Rf>(s[j])),
        ] {
            let got = r.mul(&x).mul(r_inv);
            let pass = got == y;
            report.push(Check::new(
                "diagram-auto",
                format!("Ad(z^-w{k} C{k}) {kind}{j} = {kind}{}", s[j]),
                pass,
                if pass {
                    "exact".to_string()
                } else {
                    format!("differs at {:?}", got.sub(&y).nonzero_positions())
                },
                "diagram automorphism sigma_k",
            ));
        }
    }
    report
}

pub fn diagram_automorphism_check(k: usize) -> Report {
    let (r, r_inv) = rotation_lift::<Rf>(k);
    diagram_automorphism_check_with(k, &r, &r_inv)
}

/// `alpha_j(z d/dz + X)` for `X` with Cartan part `cartan`: the eigenvalue of
/// `ad(z d/dz + cartan)` on `E_j`.
pub fn affine_root_values(cartan: &RfMatrix) -> Result<[Rf; 5]> {
    let mut out: [Rf; 5] = std::array::from_fn(|_| Rf::zero());
    for (j, slot) in out.iter_mut().enumerate() {
        let ej = e::<Rf>(j);
        let image = ej.z_deriv().add(&cartan.commutator(&ej));
        let (i, l) = ej.nonzero_positions()[0];
        let (h, coeff) = ej.get(i, l).terms().next().expect("nonzero entry");
        let value = image.get(i, l).coeff(h).cloned().unwrap_or_else(Rf::zero) / coeff;
        if image != ej.scale(&value) {
            return Err(CoreError::Invalid(format!("E{j} is not an eigenvector")));
        }
        *slot = value;
    }
    Ok(out)
}

/// The `z^0` diagonal of a matrix.
pub fn cartan_part(m: &RfMatrix) -> RfMatrix {
    LoopMatrix::diag(std::array::from_fn(|i| {
        LaurentPoly::constant(m.get(i, i).coeff_int(0))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chevalley_generators_have_the_displayed_cartan_elements() {
        for j in 0..5 {
            let want = h_vec(&h_coordinates(j).map(c));
            assert_eq!(h::<Rf>(j), want, "H{j}");
        }
    }

    #[test]
    fn generators_are_in_the_algebra() {
        for j in 0..5 {
            assert!(e::<Rf>(j).in_algebra());
            assert!(f::<Rf>(j).in_algebra());
        }
    }

    #[test]
    fn m_entry_seven_one() {
        let m = build_m();
        assert_eq!(*m.get(6, 0), LaurentPoly::monomial(t() - q(), 2));
        assert!(m.in_algebra());
        assert!(build_b().in_algebra());
    }

    #[test]
    fn borel_forms_match_displays() {
        assert_eq!(build_m_borel(), build_m());
        assert_eq!(build_b_borel(), build_b());
    }

    #[test]
    fn x1_and_u4_as_displayed() {
        let k = BCoefficients::symbolic();
        assert_eq!(k.x[0], (q() - t()) / (t() * (t() - c(1))));
        let tt = t() * (t() - c(1));
        let want = -((q() - t()) * p()) + (alpha(3) - alpha(4)) * fr(1, 2) * t()
            + (alpha(0) + alpha(4) - c(1)) * fr(1, 2);
        assert_eq!(&tt * &k.u[3], want);
    }

    #[test]
    fn g_matrices_are_group_elements() {
        for k in 0..5 {
            let (g, gi) = gauge_g_with(k, &g_coefficient(k));
            assert_eq!(g.mul(&gi), RfMatrix::identity());
            assert!(g.in_group(), "G{k}");
        }
    }

    #[test]
    fn gamma_one_corner_entry() {
        let g = gamma_explicit(1);
        let (_, r, _) = the_root(1);
        assert_eq!(*g.get(7, 0), LaurentPoly::monomial(r, 2));
    }

    #[test]
    fn z_weight_three_is_the_displayed_half_powers() {
        let w = z_weight::<Rf>(3, true);
        let ex: Vec<i32> = (0..4).map(|i| w.get(i, i).terms().next().unwrap().0).collect();
        assert_eq!(ex, vec![1, 1, 1, -1]);
    }

    #[test]
    fn c_three_has_the_displayed_signs() {
        let m = c_matrix::<Rf>(3);
        assert_eq!(*m.get(3, 0), LaurentPoly::one().neg());
        assert_eq!(*m.get(0, 3), LaurentPoly::one());
        assert_eq!(*m.get(4, 7), LaurentPoly::one().neg());
        assert!(m.in_group());
    }

    #[test]
    fn exp_of_minus_e1_truncates() {
        let e1 = e::<Rf>(1);
        assert!(e1.mul(&e1).is_zero());
    }

    #[test]
    fn diagram_automorphism_sends_e0_to_e1() {
        let report = diagram_automorphism_check(1);
        assert!(report.passed());
    }

    #[test]
    fn affine_roots_evaluate_to_the_parameters() {
        let vals = affine_root_values(&cartan_part(&build_m())).unwrap();
        let total = vals[0].clone() + &vals[1] + c(2) * &vals[2] + &vals[3] + &vals[4];
        assert_eq!(total, c(1));
        for (j, v) in vals.iter().enumerate() {
            assert_eq!(*v, alpha(j));
        }
    }
}
