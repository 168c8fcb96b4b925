use proptest::prelude::*;
use pvi_core::hamiltonian::{poisson, HamiltonianSystem};
use pvi_core::weyl::{apply_word, AffineRootVec, GroupWord};
use pvi_field::{RationalFunction as Rf, Var};

fn expr() -> impl Strategy<Value = Rf> {
    let atom = prop_oneof![
        Just(Rf::var(Var::Q)),
        Just(Rf::var(Var::P)),
        Just(Rf::var(Var::T)),
        Just(Rf::var(Var::A2)),
        (-3i64..=3).prop_map(Rf::from_int),
    ];
    atom.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner.clone(), 1i64..=4).prop_map(|(a, k)| &a / &(&Rf::var(Var::Q) + &Rf::from_int(k))),
        ]
    })
}

fn word() -> impl Strategy<Value = GroupWord> {
    const GENS: [&str; 8] = ["s0", "s1", "s2", "s3", "s4", "r1", "r3", "r4"];
    prop::collection::vec(prop::sample::select(&GENS[..]), 0..8)
        .prop_map(|w| w.join(" ").parse().unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn poisson_bracket_is_antisymmetric_and_leibniz(f in expr(), g in expr(), h in expr()) {
        prop_assert_eq!(poisson(&f, &g), -poisson(&g, &f));
        let lhs = poisson(&f, &(&g * &h));
        let rhs = &(&g * &poisson(&f, &h)) + &(&poisson(&f, &g) * &h);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn delta_is_a_derivation(f in expr(), g in expr()) {
        let sys = HamiltonianSystem::symbolic();
        prop_assert_eq!(sys.delta(&(&f * &g)), &(&sys.delta(&f) * &g) + &(&f * &sys.delta(&g)));
        prop_assert_eq!(sys.delta(&(&f + &g)), &sys.delta(&f) + &sys.delta(&g));
    }

    #[test]
    fn words_act_on_roots_as_a_group(w in word()) {
        let id = AffineRootVec::identity();
        let moved = apply_word(&w, &id);
        prop_assert!(moved.satisfies_null_relation());
        prop_assert_eq!(apply_word(&w.concat(&w.inverse()), &id), id.clone());
        prop_assert_eq!(apply_word(&w.inverse(), &moved), id);
    }
}
