use std::collections::BTreeMap;

use mumford_core::algebra::rat;
use mumford_core::{Coefficient, Generator, Monomial, Rational, TruncatedSeries};
use proptest::prelude::*;

const NAMES: [&str; 3] = ["s", "t5", "u"];

fn rational() -> impl Strategy<Value = Rational> {
    (-12i64..=12, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn monomial() -> impl Strategy<Value = Monomial> {
    proptest::collection::vec(0u32..=3, NAMES.len()).prop_map(|exps| {
        Monomial::from_pairs(
            NAMES
                .iter()
                .zip(exps)
                .map(|(n, e)| (Generator::new(*n).unwrap(), e)),
        )
    })
}

fn coefficient() -> impl Strategy<Value = Coefficient> {
    proptest::collection::vec((rational(), monomial()), 0..5).prop_map(Coefficient::from_terms)
}

fn assignment() -> impl Strategy<Value = BTreeMap<Generator, Rational>> {
    proptest::collection::vec(rational(), NAMES.len()).prop_map(|vals| {
        NAMES
            .iter()
            .map(|n| Generator::new(*n).unwrap())
            .zip(vals)
            .collect()
    })
}

/// Series with no constant term, `[z^1 .. z^max]`.
fn positive_series(max: i32) -> impl Strategy<Value = TruncatedSeries> {
    proptest::collection::vec(coefficient(), max as usize)
        .prop_map(move |cs| TruncatedSeries::from_terms(1, max, (1..).zip(cs)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(a in coefficient(), b in coefficient(), c in coefficient()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Coefficient::zero());
        prop_assert_eq!(&a * &Coefficient::one(), a.clone());
    }

    #[test]
    fn eval_is_a_ring_homomorphism(a in coefficient(), b in coefficient(), x in assignment()) {
        let (va, vb) = (a.eval(&x).unwrap(), b.eval(&x).unwrap());
        prop_assert_eq!((&a * &b).eval(&x).unwrap(), &va * &vb);
        prop_assert_eq!((&a + &b).eval(&x).unwrap(), va + vb);
    }

    #[test]
    fn text_and_json_round_trip(a in coefficient()) {
        prop_assert_eq!(a.to_string().parse::<Coefficient>().unwrap(), a.clone());
        prop_assert_eq!(Coefficient::from_json(&a.to_json()).unwrap(), a);
    }

    #[test]
    fn geometric_inverse_inverts(d in positive_series(5)) {
        let inv = d.geometric_inverse().unwrap();
        let one_minus = TruncatedSeries::constant(Coefficient::one(), 5).sub(&d);
        prop_assert_eq!(inv.mul(&one_minus), TruncatedSeries::constant(Coefficient::one(), 5));
    }

    #[test]
    fn log_and_exp_are_inverse(f in positive_series(4)) {
        let g = f.log_one_minus().unwrap();
        prop_assert_eq!(g.exp_negative().unwrap(), f);
    }

    #[test]
    fn series_mul_is_commutative(a in positive_series(4), b in positive_series(4)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
    }
}
