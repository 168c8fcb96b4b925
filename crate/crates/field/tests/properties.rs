use proptest::prelude::*;
use pvi_field::{gcd, Monomial, Polynomial, Rational, RationalFunction, Var};

const VARS: [Var; 4] = [Var::Q, Var::P, Var::T, Var::A1];

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::array::uniform4(0u16..3), -5i64..=5), 1..5).prop_map(|terms| {
        Polynomial::from_terms(terms.into_iter().map(|(e, c)| {
            let mut exps = [0u16; pvi_field::NVARS];
            for (v, k) in VARS.iter().zip(e) {
                exps[v.index()] = k;
            }
            (Monomial::new(exps), Rational::from_integer(c.into()))
        }))
    })
}

fn nonzero_poly() -> impl Strategy<Value = Polynomial> {
    poly().prop_filter("nonzero", |p| !p.is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_commutes_and_distributes(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    }

    #[test]
    fn gcd_divides_and_keeps_common_factors(f in nonzero_poly(), g in nonzero_poly(), h in nonzero_poly()) {
        let a = &f * &g;
        let b = &f * &h;
        let d = gcd(&a, &b);
        prop_assert!(a.div_exact(&d).is_some());
        prop_assert!(b.div_exact(&d).is_some());
        prop_assert!(d.div_exact(&f.monic()).is_some());
    }

    #[test]
    fn fractions_are_kept_in_lowest_terms(a in nonzero_poly(), b in nonzero_poly(), c in nonzero_poly()) {
        let x = RationalFunction::new(&a * &c, &b * &c).unwrap();
        let y = RationalFunction::new(a.clone(), b.clone()).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert!(gcd(x.numer(), x.denom()).is_one());
        prop_assert!((&x * &x.inv().unwrap()).is_one());
    }

    #[test]
    fn derivative_obeys_leibniz(a in poly(), b in nonzero_poly()) {
        let (x, y) = (RationalFunction::from(a), RationalFunction::from(b).inv().unwrap());
        for v in VARS {
            let lhs = (&x * &y).differentiate(v);
            let rhs = &(&x.differentiate(v) * &y) + &(&x * &y.differentiate(v));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
