mod common;

use bellforge::equivalence::{self, GroupElement};
use bellforge::{polytope, FullCorrelationInequality, Limits, Rational, Scenario};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn scenarios() -> impl Strategy<Value = Scenario> {
    prop::sample::select(vec![
        vec![2, 2],
        vec![2, 3],
        vec![3, 3],
        vec![1, 2, 2],
        vec![2, 2, 2],
        vec![1, 3, 2],
    ])
    .prop_map(|m| Scenario::new(m).unwrap())
}

/// Coefficients in {−1, 0, 1} so random pairs are often equivalent.
fn sparse_in(s: Scenario) -> impl Strategy<Value = FullCorrelationInequality> {
    let d = s.dimension();
    prop::collection::vec(-1i64..=1, d).prop_map(move |v| {
        let dense: Vec<Rational> = v.into_iter().map(Rational::from_integer).collect();
        FullCorrelationInequality::from_dense(s.clone(), &dense).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_form_is_an_orbit_member(ineq in scenarios().prop_flat_map(inequality_in)) {
        let canon = equivalence::canonical_form(&ineq, &Limits::default()).unwrap();
        prop_assert!(orbit(&ineq).contains(canon.terms()));
    }

    #[test]
    fn equivalence_matches_orbit_oracle(
        (a, b) in scenarios().prop_flat_map(|s| (sparse_in(s.clone()), sparse_in(s)))
    ) {
        let same = orbit(&a).contains(b.terms());
        prop_assert_eq!(equivalence::equivalent(&a, &b, &Limits::default()).unwrap(), same);
    }

    #[test]
    fn canonical_form_is_constant_on_orbits(ineq in scenarios().prop_flat_map(inequality_in), seed: u64) {
        let limits = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::random(ineq.scenario(), &mut rng);
        let moved = equivalence::act(&g, &ineq).unwrap();
        prop_assert!(orbit(&ineq).contains(moved.terms()));
        let c = equivalence::canonical_form(&ineq, &limits).unwrap();
        prop_assert!(equivalence::canonical_form(&moved, &limits).unwrap().same_form(&c));
        prop_assert!(equivalence::canonical_form(&c, &limits).unwrap().same_form(&c));
    }

    #[test]
    fn group_action_preserves_bounds_and_tightness(ineq in inequality(3, 3), seed: u64) {
        let limits = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = GroupElement::random(ineq.scenario(), &mut rng);
        let moved = equivalence::act(&g, &ineq).unwrap();
        prop_assert_eq!(brute_lr(&moved), brute_lr(&ineq));
        prop_assert_eq!(moved.algebraic_bound(), ineq.algebraic_bound());
        prop_assert_eq!(
            polytope::tightness(&moved, &limits).unwrap(),
            polytope::tightness(&ineq, &limits).unwrap()
        );
        let back = equivalence::act(&g.inverse(), &moved).unwrap();
        prop_assert!(back.same_form(&ineq));
    }

    #[test]
    fn canonicalize_witness_maps_input_to_form(ineq in inequality(3, 3)) {
        let (canon, g) = equivalence::canonicalize(&ineq, &Limits::default()).unwrap();
        prop_assert!(equivalence::act(&g, &ineq).unwrap().same_form(&canon));
    }
}
