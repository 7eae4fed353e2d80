//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library beyond constructors and accessors.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bellforge::model::{PartialTuple, SettingTuple};
use bellforge::{FullCorrelationInequality, GeneralInequality, Rational, Scenario};
use num_traits::{Signed, Zero};
use proptest::prelude::*;

/// Every deterministic strategy as explicit outcome tables.
pub fn strategies(s: &Scenario) -> Vec<Vec<Vec<i8>>> {
    let mut out = vec![Vec::new()];
    for p in 0..s.parties() {
        let m = s.settings(p);
        let mut next = Vec::new();
        for prefix in &out {
            for mask in 0..1u32 << m {
                let mut t = prefix.clone();
                t.push((0..m).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect::<Vec<i8>>());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

pub fn full_value(ineq: &FullCorrelationInequality, x: &[Vec<i8>]) -> Rational {
    let mut v = Rational::zero();
    for (t, c) in ineq.terms() {
        let sign: i8 = t.iter().enumerate().map(|(p, &i)| x[p][i]).product();
        v += if sign > 0 { *c } else { -*c };
    }
    v
}

pub fn general_value(g: &GeneralInequality, x: &[Vec<i8>]) -> Rational {
    let mut v = g.constant();
    for (t, c) in g.terms() {
        let sign: i8 = t.iter().enumerate().map(|(p, i)| i.map_or(1, |i| x[p][i])).product();
        v += if sign > 0 { *c } else { -*c };
    }
    v
}

pub fn brute_lr(ineq: &FullCorrelationInequality) -> Rational {
    strategies(ineq.scenario()).iter().map(|x| full_value(ineq, x)).max().unwrap()
}

pub fn brute_general_extremes(g: &GeneralInequality) -> (Rational, Rational) {
    let values: Vec<Rational> = strategies(g.scenario()).iter().map(|x| general_value(g, x)).collect();
    (*values.iter().min().unwrap(), *values.iter().max().unwrap())
}

fn correlation_vector(s: &Scenario, x: &[Vec<i8>]) -> Vec<Rational> {
    s.tuples()
        .map(|t| {
            let sign: i64 = t.iter().enumerate().map(|(p, &i)| x[p][i] as i64).product();
            Rational::from_integer(sign)
        })
        .collect()
}

/// Rank by Gaussian elimination over the rationals.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let mut r = 0;
    let cols = rows.first().map_or(0, Vec::len);
    for c in 0..cols {
        let Some(pivot) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pivot);
        for i in r + 1..rows.len() {
            if rows[i][c].is_zero() {
                continue;
            }
            let f = rows[i][c] / rows[r][c];
            for j in c..cols {
                let d = f * rows[r][j];
                rows[i][j] -= d;
            }
        }
        r += 1;
    }
    r
}

/// (saturating strategies, rank of their correlation vectors) at `bound`.
pub fn brute_tightness(ineq: &FullCorrelationInequality, bound: Rational) -> (u64, usize) {
    let s = ineq.scenario();
    let tight: Vec<_> = strategies(s).into_iter().filter(|x| full_value(ineq, x) == bound).collect();
    let rows = tight.iter().map(|x| correlation_vector(s, x)).collect();
    (tight.len() as u64, rank(rows))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Coefficient maps of every image of `ineq` under party permutations
/// (preserving setting counts), setting permutations and observable signs.
pub fn orbit(ineq: &FullCorrelationInequality) -> BTreeSet<BTreeMap<SettingTuple, Rational>> {
    let s = ineq.scenario();
    let n = s.parties();
    let mut out = BTreeSet::new();
    for parties in permutations(n) {
        if (0..n).any(|p| s.settings(parties[p]) != s.settings(p)) {
            continue;
        }
        // per-party (permutation, sign mask) choices
        let mut locals: Vec<Vec<(Vec<usize>, u32)>> = Vec::new();
        for p in 0..n {
            let m = s.settings(p);
            let mut choices = Vec::new();
            for perm in permutations(m) {
                for mask in 0..1u32 << m {
                    choices.push((perm.clone(), mask));
                }
            }
            locals.push(choices);
        }
        let mut index = vec![0usize; n];
        loop {
            let mut terms = BTreeMap::new();
            for (t, c) in ineq.terms() {
                // new party p reads original party parties[p]
                let mut u = vec![0; n];
                let mut negative = false;
                for p in 0..n {
                    let (perm, mask) = &locals[p][index[p]];
                    let orig = t[parties[p]];
                    let k = perm.iter().position(|&j| j == orig).unwrap();
                    u[p] = k;
                    negative ^= mask >> k & 1 == 1;
                }
                terms.insert(u, if negative { -*c } else { *c });
            }
            out.insert(terms);
            let mut p = 0;
            while p < n {
                index[p] += 1;
                if index[p] < locals[p].len() {
                    break;
                }
                index[p] = 0;
                p += 1;
            }
            if p == n {
                break;
            }
        }
    }
    out
}

pub fn small_rational() -> impl Strategy<Value = Rational> {
    prop_oneof![
        1 => Just(Rational::zero()),
        3 => (-6i64..=6, 1i64..=4).prop_map(|(a, b)| Rational::new(a, b)),
    ]
}

pub fn scenario(max_parties: usize, max_settings: usize) -> impl Strategy<Value = Scenario> {
    prop::collection::vec(1..=max_settings, 2..=max_parties).prop_map(|m| Scenario::new(m).unwrap())
}

pub fn inequality_in(s: Scenario) -> impl Strategy<Value = FullCorrelationInequality> {
    let d = s.dimension();
    prop::collection::vec(small_rational(), d)
        .prop_map(move |dense| FullCorrelationInequality::from_dense(s.clone(), &dense).unwrap())
}

pub fn inequality(max_parties: usize, max_settings: usize) -> impl Strategy<Value = FullCorrelationInequality> {
    scenario(max_parties, max_settings).prop_flat_map(inequality_in)
}

/// Rescales so the inequality is tight; `None` for the zero inequality.
pub fn as_face(ineq: &FullCorrelationInequality) -> Option<FullCorrelationInequality> {
    let lr = brute_lr(ineq);
    if !lr.is_positive() {
        return None;
    }
    Some(FullCorrelationInequality::new(ineq.scenario().clone(), ineq.terms().clone(), lr).unwrap())
}

pub fn general_in(s: Scenario) -> impl Strategy<Value = GeneralInequality> {
    let n = s.parties();
    let m = s.settings_per_party().to_vec();
    let key = m
        .iter()
        .map(|&k| prop::option::weighted(0.7, 0..k))
        .collect::<Vec<_>>()
        .prop_filter("empty term", |t: &PartialTuple| t.iter().any(Option::is_some));
    (
        prop::collection::vec((key, small_rational()), 1..6),
        small_rational(),
        small_rational(),
    )
        .prop_map(move |(terms, constant, bound)| {
            assert_eq!(terms[0].0.len(), n);
            GeneralInequality::new(s.clone(), terms, constant, bound).unwrap()
        })
}
