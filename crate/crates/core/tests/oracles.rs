//! Cross-checks against values computed independently of the library code.

use pvi_core::backlund::{alpha, generator_map, reflection_map};
use pvi_core::hamiltonian::{fuchsian_coeffs, hamiltonian_h, residue_at, residue_at_infinity, ParamVec};
use pvi_core::lax;
use pvi_core::weyl::{root_action, AffineRootVec, Generator};
use pvi_field::{Rational, RationalFunction as Rf, Var};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

#[test]
fn hamiltonian_spot_value_matches_direct_evaluation() {
    let (k0, k1, kt, rho) = (r(1, 3), r(1, 5), r(1, 7), r(1, 11));
    let kinf = r(1, 1) - &k0 - &k1 - &kt - r(2, 1) * &rho;
    let pv = ParamVec::kappa([&k0, &k1, &kt, &kinf, &rho].map(|x| Rf::constant(x.clone()))).unwrap();
    let (q, p, t) = (r(2, 1), r(1, 1), r(3, 1));
    let one = r(1, 1);

    // Term by term, in exact rationals.
    let quartic = &p * &p * &q * (&q - &one) * (&q - &t);
    let brace = &k0 * (&q - &one) * (&q - &t) + &k1 * &q * (&q - &t) + (&kt - &one) * &q * (&q - &one);
    let constant = &rho * (&kinf + &rho) * (&q - &t);
    let want = (quartic - &p * brace + constant) / (&t * (&t - &one));

    let got = hamiltonian_h(&pv)
        .substitute(&pv.specialization())
        .unwrap()
        .eval_rational(&[(Var::Q, q), (Var::P, p), (Var::T, t)])
        .unwrap();
    assert_eq!(got, want);
}

#[test]
fn residues_of_a2_sum_to_zero_on_the_sphere() {
    let pv = ParamVec::symbolic();
    let (a1, a2) = fuchsian_coeffs(&pv);
    let points = [Rf::zero(), Rf::from_int(1), Rf::var(Var::T), Rf::var(Var::Q)];
    for f in [&a1, &a2] {
        let mut total = residue_at_infinity(f);
        for at in &points {
            total = &total + &residue_at(f, at).unwrap();
        }
        assert!(total.is_zero(), "total residue {total}");
    }
}

#[test]
fn s0_on_parameters_agrees_with_the_root_action() {
    let m = reflection_map(0);
    assert_eq!(m.roots, root_action(Generator::S(0), &AffineRootVec::identity()));
    assert_eq!(m.root_image(0), -alpha(0));
    assert_eq!(m.root_image(2), &alpha(2) + &alpha(0));
}

#[test]
fn zero_curvature_fails_when_q_and_p_are_frozen() {
    let frozen = lax::zero_curvature_residual_with(&lax::build_m(), &lax::build_b(), &|x| x.differentiate(Var::T));
    assert!(!frozen.is_zero());
}

#[test]
fn rotations_leave_t_alone() {
    for k in [1, 3, 4] {
        assert_eq!(generator_map(Generator::R(k)).unwrap().t, Rf::var(Var::T));
    }
}
