mod common;

use bellforge::lift;
use bellforge::model::SettingTuple;
use bellforge::{polytope, FullCorrelationInequality, Limits, Rational, Scenario};
use common::*;
use num_traits::{One, Zero};
use proptest::prelude::*;

/// Lift coefficients written out term by term.
fn lift_oracle(faces: &[FullCorrelationInequality]) -> Vec<(SettingTuple, Rational)> {
    let n = faces.len() as i64;
    let half = Rational::new(1, 2);
    let s = faces[0].scenario();
    let mut out = Vec::new();
    for t in s.tuples() {
        let b: Vec<Rational> = faces.iter().map(|f| f.coefficient(&t)).collect();
        let first = if n == 1 {
            b[0]
        } else {
            Rational::new(3 - n, 2) * b[0] + half * b[1..].iter().copied().sum::<Rational>()
        };
        let mut u = t.clone();
        u.push(0);
        out.push((u, first));
        for k in 1..b.len() {
            let mut u = t.clone();
            u.push(k);
            out.push((u, half * (b[0] - b[k])));
        }
    }
    out
}

fn faces_in(s: Scenario, n: usize) -> impl Strategy<Value = Vec<FullCorrelationInequality>> {
    prop::collection::vec(inequality_in(s), n)
}

fn f22() -> Vec<FullCorrelationInequality> {
    let s = Scenario::uniform(2, 2).unwrap();
    polytope::enumerate_facets(&s, &Limits::default()).unwrap().facets
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn structure_identity(ineq in inequality(3, 3), p in 0usize..3) {
        let p = p % ineq.scenario().parties();
        let d = lift::decompose(&ineq, p).unwrap();
        prop_assert_eq!(d.components.len(), ineq.scenario().settings(p));
        let rebuilt = lift::lift_at(&lift::structure_values(&d), p).unwrap();
        prop_assert!(rebuilt.same_form(&ineq));
    }

    #[test]
    fn lift_matches_formula(
        faces in (scenario(2, 2), 1usize..=3).prop_flat_map(|(s, n)| faces_in(s, n))
    ) {
        let faces: Vec<_> = faces.into_iter().map(|f| f.with_unit_scale()).collect();
        let s = faces[0].scenario().with_party(faces[0].scenario().parties(), faces.len()).unwrap();
        let want = FullCorrelationInequality::new(s, lift_oracle(&faces), Rational::one()).unwrap();
        let got = lift::compose_lift(&faces, false, &Limits::default()).unwrap().inequality;
        prop_assert!(got.same_form(&want));
    }

    #[test]
    fn valid_lifts_of_facets_are_facets(picks in prop::collection::vec(0usize..16, 1..=3)) {
        let all = f22();
        let faces: Vec<_> = picks.iter().map(|&i| all[i].clone()).collect();
        let lifted = lift::compose_lift(&faces, true, &Limits::default()).unwrap();
        let lr = brute_lr(&lifted.inequality);
        if lr <= Rational::one() {
            prop_assert_eq!(lr, Rational::one());
            let (_, rank) = brute_tightness(&lifted.inequality, Rational::one());
            prop_assert_eq!(rank, lifted.inequality.scenario().dimension());
            prop_assert_eq!(lifted.is_facet(), Some(true));
        }
    }
}

#[test]
fn valid_lifts_of_nonfacet_faces_are_faces() {
    let s = Scenario::uniform(2, 2).unwrap();
    let trivial: Vec<FullCorrelationInequality> = s
        .tuples()
        .map(|t| FullCorrelationInequality::new(s.clone(), vec![(t, Rational::one())], Rational::one()).unwrap())
        .collect();
    // sums of two trivial facets are faces but not facets
    let mut faces = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            let mut terms: Vec<_> = trivial[i].terms().clone().into_iter().collect();
            terms.extend(trivial[j].terms().clone());
            faces.push(FullCorrelationInequality::new(s.clone(), terms, Rational::from_integer(2)).unwrap());
        }
    }
    for a in &faces {
        for b in &faces {
            let lifted = lift::chsh_extend(a, b).unwrap();
            if brute_lr(&lifted) <= Rational::one() {
                assert_eq!(brute_lr(&lifted), Rational::one());
            }
        }
    }
}

#[test]
fn two_setting_split_of_all_f222_facets() {
    let s = Scenario::uniform(3, 2).unwrap();
    for f in polytope::enumerate_facets(&s, &Limits::default()).unwrap().facets {
        let d = lift::decompose(&f, 2).unwrap();
        let [b1, b2]: [FullCorrelationInequality; 2] = lift::structure_values(&d).try_into().unwrap();
        for b in [&b1, &b2] {
            assert_eq!(brute_lr(b), Rational::one());
            assert_eq!(brute_tightness(b, Rational::one()).1, 4);
        }
        assert!(lift::chsh_extend(&b1, &b2).unwrap().same_form(&f));
    }
}

#[test]
fn decompose_then_lift_at_zero_face() {
    let s = Scenario::uniform(2, 2).unwrap();
    let zero = FullCorrelationInequality::from_dense(s, &[Rational::zero(); 4]).unwrap();
    let d = lift::decompose(&zero, 0).unwrap();
    assert!(d.components.iter().all(FullCorrelationInequality::is_zero));
}
