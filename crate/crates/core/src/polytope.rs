//! Deterministic strategies, local-realistic bounds, face/facet certificates
//! and brute-force facet enumeration for tiny scenarios.
//!
//! Vertices are packed into a `u64`: party `p`'s setting `i` is bit
//! `offset(p) + i`, a set bit meaning outcome −1. Enumeration is a binary
//! counter over these bits; the reduced stream fixes bit 0 (first setting of
//! the first party) to +1 so that only one of each inversion pair appears.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use itertools::Itertools;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::equivalence;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::linalg::{self, IncrementalRank};
use crate::model::json::as_document;
use crate::model::rational::{self, Rational};
use crate::model::{low_mask, FullCorrelationInequality, GeneralInequality, Scenario, Vertex};

/// Stream of deterministic strategies in binary-counter order.
#[derive(Clone, Debug)]
pub struct Vertices {
    scenario: Scenario,
    next: u64,
    end: u64,
    shift: u32,
}

impl Iterator for Vertices {
    type Item = Vertex;

    fn next(&mut self) -> Option<Vertex> {
        if self.next >= self.end {
            return None;
        }
        let bits = self.next << self.shift;
        self.next += 1;
        Some(Vertex::from_bits(&self.scenario, bits))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Vertices {}

/// Enumerates the deterministic strategies of a scenario.
pub fn enumerate_vertices(scenario: &Scenario, reduced: bool, limits: &Limits) -> Result<Vertices> {
    limits.check_enumeration(scenario, "vertex enumeration")?;
    let bits = scenario.total_settings() as u32 - u32::from(reduced);
    Ok(Vertices {
        scenario: scenario.clone(),
        next: 0,
        end: 1u64 << bits,
        shift: u32::from(reduced),
    })
}

/// Integer form of an inequality: coefficients over a common denominator,
/// term keys as masks over packed vertex bits.
pub(crate) struct Compiled {
    pub denominator: i64,
    pub terms: Vec<(u64, i64)>,
}

impl Compiled {
    pub fn new(ineq: &FullCorrelationInequality) -> Self {
        let offsets = ineq.scenario().offsets();
        let denominator = ineq
            .terms()
            .values()
            .fold(1i64, |acc, c| acc.lcm(c.denom()));
        let terms = ineq
            .terms()
            .iter()
            .map(|(t, c)| {
                let mask = t
                    .iter()
                    .zip(&offsets)
                    .fold(0u64, |m, (&i, &o)| m | 1 << (o + i));
                (mask, c.numer() * (denominator / c.denom()))
            })
            .collect();
        Compiled { denominator, terms }
    }

    #[inline]
    pub fn value(&self, bits: u64) -> i64 {
        self.terms
            .iter()
            .map(|&(mask, c)| if (bits & mask).count_ones() & 1 == 0 { c } else { -c })
            .sum()
    }

    pub fn scaled(&self, value: Rational) -> Option<i64> {
        let v = value * Rational::from_integer(self.denominator);
        v.is_integer().then(|| v.to_integer())
    }
}

/// Local-realistic bound: the maximum of the inequality's expression over all
/// deterministic strategies.
///
/// The last party is optimized analytically: for fixed outcomes of the other
/// parties the expression is `sum_k c_k f_k`, maximized at `sum_k |f_k|`.
pub fn lr_bound(ineq: &FullCorrelationInequality, limits: &Limits) -> Result<Rational> {
    let scenario = ineq.scenario();
    limits.check_enumeration(scenario, "local bound")?;
    let compiled = Compiled::new(ineq);
    let n = scenario.parties();
    let last = n - 1;
    let last_offset = scenario.offsets()[last];
    let m_last = scenario.settings(last);
    let mut by_setting: Vec<Vec<(u64, i64)>> = vec![Vec::new(); m_last];
    for &(mask, c) in &compiled.terms {
        let k = (mask >> last_offset).trailing_zeros() as usize;
        by_setting[k].push((mask & low_mask(last_offset), c));
    }
    let other_bits = last_offset as u32;
    // Flipping the first party negates every f_k, which |.| absorbs.
    let (count, shift) = if n >= 2 {
        (1u64 << (other_bits - 1), 1)
    } else {
        (1, 0)
    };
    let mut best = i64::MIN;
    for j in 0..count {
        let bits = j << shift;
        let v: i64 = by_setting
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|&(mask, c)| if (bits & mask).count_ones() & 1 == 0 { c } else { -c })
                    .sum::<i64>()
                    .abs()
            })
            .sum();
        best = best.max(v);
    }
    Ok(Rational::new(best, compiled.denominator))
}

/// Maximum and minimum of a general inequality's left-hand side over all
/// deterministic strategies, by exhaustive enumeration.
pub fn general_extremes(ineq: &GeneralInequality, limits: &Limits) -> Result<(Rational, Rational)> {
    let scenario = ineq.scenario();
    limits.check_enumeration(scenario, "local bound")?;
    let offsets = scenario.offsets();
    let denominator = ineq
        .terms()
        .values()
        .fold(ineq.constant().denom().to_owned(), |acc, c| acc.lcm(c.denom()));
    let terms: Vec<(u64, i64)> = ineq
        .terms()
        .iter()
        .map(|(t, c)| {
            let mask = t
                .iter()
                .zip(&offsets)
                .filter_map(|(i, &o)| i.map(|i| 1u64 << (o + i)))
                .fold(0, |m, b| m | b);
            (mask, c.numer() * (denominator / c.denom()))
        })
        .collect();
    let constant = ineq.constant().numer() * (denominator / ineq.constant().denom());
    let (mut hi, mut lo) = (i64::MIN, i64::MAX);
    for bits in 0..1u64 << scenario.total_settings() {
        let v = constant
            + terms
                .iter()
                .map(|&(mask, c)| if (bits & mask).count_ones() & 1 == 0 { c } else { -c })
                .sum::<i64>();
        hi = hi.max(v);
        lo = lo.min(v);
    }
    Ok((Rational::new(hi, denominator), Rational::new(lo, denominator)))
}

/// Local-realistic bound of a general inequality (exhaustive).
pub fn general_lr_bound(ineq: &GeneralInequality, limits: &Limits) -> Result<Rational> {
    Ok(general_extremes(ineq, limits)?.0)
}

/// Face and facet certificate for an inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TightnessReport {
    #[serde(with = "rational::as_string")]
    pub lr_max: Rational,
    #[serde(with = "rational::as_string")]
    pub bound: Rational,
    pub is_face: bool,
    /// Deterministic strategies (of all `2^(sum m_p)`) attaining the bound.
    pub saturating_count: u64,
    /// Rank of the correlation vectors of the saturating strategies.
    pub rank: usize,
    pub dimension: usize,
    pub is_facet: bool,
}

/// Packed bits with each party normalized to outcome +1 on its first setting.
/// Two strategies share a key iff their correlation vectors agree up to sign.
fn normalized_key(bits: u64, offsets: &[usize], settings: &[usize]) -> u64 {
    let mut key = bits;
    for (&o, &m) in offsets.iter().zip(settings) {
        if key >> o & 1 == 1 {
            key ^= low_mask(m) << o;
        }
    }
    key
}

/// Correlation vector (one ±1 entry per setting tuple, mixed-radix order).
pub(crate) fn correlation_row(scenario: &Scenario, bits: u64) -> Vec<i8> {
    let mut row = vec![1i8];
    for (&o, &m) in scenario.offsets().iter().zip(scenario.settings_per_party()) {
        let party: Vec<i8> = (0..m)
            .map(|i| if bits >> (o + i) & 1 == 1 { -1 } else { 1 })
            .collect();
        row = row
            .iter()
            .flat_map(|&x| party.iter().map(move |&y| x * y))
            .collect();
    }
    row
}

/// Collects the strategies attaining the bound and certifies the rank of
/// their correlation vectors exactly.
pub fn tightness(ineq: &FullCorrelationInequality, limits: &Limits) -> Result<TightnessReport> {
    let scenario = ineq.scenario();
    limits.check_enumeration(scenario, "tightness check")?;
    let compiled = Compiled::new(ineq);
    let bound = compiled
        .scaled(ineq.bound())
        .expect("normalized bounds are integers");
    let offsets = scenario.offsets();
    let settings = scenario.settings_per_party();
    let dimension = scenario.dimension();
    let mut rank = IncrementalRank::new(dimension);
    let mut seen: HashSet<u64> = HashSet::new();
    let mut best = i64::MIN;
    let mut saturating = 0u64;
    let count = 1u64 << (scenario.total_settings() - 1);
    for j in 0..count {
        let bits = j << 1;
        let v = compiled.value(bits);
        best = best.max(v.abs());
        // The inversion partner (first party flipped) takes value -v.
        let hits = u64::from(v == bound) + u64::from(-v == bound);
        if hits == 0 {
            continue;
        }
        saturating += hits;
        if !rank.is_full() {
            let key = normalized_key(bits, &offsets, settings);
            if seen.insert(key) {
                rank.insert(&correlation_row(scenario, key));
            }
        }
    }
    let lr_max = Rational::new(best, compiled.denominator);
    let is_face = lr_max == ineq.bound() && saturating >= 1;
    Ok(TightnessReport {
        lr_max,
        bound: ineq.bound(),
        is_face,
        saturating_count: saturating,
        rank: rank.rank(),
        dimension,
        is_facet: is_face && rank.rank() == dimension,
    })
}

/// Facets of a tiny correlation polytope with their equivalence classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetList {
    pub scenario: Scenario,
    #[serde(with = "facet_documents")]
    pub facets: Vec<FullCorrelationInequality>,
    /// Indices into `facets`, one group per equivalence class, ordered by
    /// first member.
    pub orbit_classes: Vec<Vec<usize>>,
}

mod facet_documents {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::as_document;
    use crate::model::FullCorrelationInequality;

    #[derive(Serialize, Deserialize)]
    struct Doc(#[serde(with = "as_document")] FullCorrelationInequality);

    pub fn serialize<S: Serializer>(v: &[FullCorrelationInequality], s: S) -> Result<S::Ok, S::Error> {
        let docs: Vec<Doc> = v.iter().cloned().map(Doc).collect();
        docs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<FullCorrelationInequality>, D::Error> {
        Ok(Vec::<Doc>::deserialize(d)?.into_iter().map(|d| d.0).collect())
    }
}

/// Enumerates all facets `sum alpha x <= 1` of a tiny full-correlation
/// polytope.
///
/// Every facet passes through `d = dimension` linearly independent vertices,
/// at most one from each `±v` pair. For each independent `d`-subset of
/// vertex pairs and each sign pattern `s`, the hyperplane through
/// `s_j v_j` is `alpha = M^{-1} s`; it is kept when `|alpha . v| <= 1` on
/// every vertex.
pub fn enumerate_facets(scenario: &Scenario, limits: &Limits) -> Result<FacetList> {
    let dimension = scenario.dimension();
    if dimension > limits.facet_dimension_cap {
        return Err(Error::Refused {
            what: format!("facet enumeration over scenario {} (dimension)", scenario),
            required: dimension,
            cap: limits.facet_dimension_cap,
        });
    }
    let reduced = scenario
        .vertex_count(true)
        .filter(|&c| c <= limits.facet_vertex_cap as u128);
    if reduced.is_none() {
        return Err(Error::Refused {
            what: format!("facet enumeration over scenario {} (vertices)", scenario),
            required: scenario.vertex_count(true).map_or(usize::MAX, |c| c as usize),
            cap: limits.facet_vertex_cap,
        });
    }
    limits.check_enumeration(scenario, "facet enumeration")?;

    let offsets = scenario.offsets();
    let settings = scenario.settings_per_party();
    let keys: BTreeSet<u64> = (0..1u64 << (scenario.total_settings() - 1))
        .map(|j| normalized_key(j << 1, &offsets, settings))
        .collect();
    let pairs: Vec<Vec<i64>> = keys
        .iter()
        .map(|&k| correlation_row(scenario, k).into_iter().map(i64::from).collect())
        .collect();

    let mut found: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for subset in (0..pairs.len()).combinations(dimension) {
        let m: Vec<Vec<i64>> = subset.iter().map(|&i| pairs[i].clone()).collect();
        if linalg::determinant(&m).is_zero() {
            continue;
        }
        let mq: Vec<Vec<Rational>> = m
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
            .collect();
        let inv = linalg::inverse(&mq).expect("nonzero determinant");
        // w[v][j] = pairs[v] . inv[:, j], on a common denominator.
        let w: Vec<Vec<Rational>> = pairs
            .iter()
            .map(|v| {
                (0..dimension)
                    .map(|j| (0..dimension).map(|k| Rational::from_integer(v[k]) * inv[k][j]).sum())
                    .collect()
            })
            .collect();
        let lcm = w
            .iter()
            .flatten()
            .fold(1i64, |acc, x: &Rational| acc.lcm(x.denom()));
        let w_int: Vec<Vec<i64>> = w
            .iter()
            .map(|r| r.iter().map(|x| x.numer() * (lcm / x.denom())).collect())
            .collect();
        for signs in 0..1u64 << dimension {
            let sign = |j: usize| if signs >> j & 1 == 1 { -1 } else { 1 };
            let supporting = w_int.iter().all(|row| {
                let v: i64 = row.iter().enumerate().map(|(j, &x)| sign(j) * x).sum();
                v.abs() <= lcm
            });
            if supporting {
                let alpha: Vec<Rational> = (0..dimension)
                    .map(|k| {
                        (0..dimension)
                            .map(|j| inv[k][j] * Rational::from_integer(sign(j)))
                            .sum()
                    })
                    .collect();
                found.insert(alpha);
            }
        }
    }

    let facets: Vec<FullCorrelationInequality> = found
        .into_iter()
        .map(|alpha| FullCorrelationInequality::from_dense(scenario.clone(), &alpha))
        .collect::<Result<_>>()?;
    let orbit_classes = classify(&facets, limits)?;
    Ok(FacetList {
        scenario: scenario.clone(),
        facets,
        orbit_classes,
    })
}

/// Groups inequalities by canonical form.
pub fn classify(ineqs: &[FullCorrelationInequality], limits: &Limits) -> Result<Vec<Vec<usize>>> {
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let mut index: Vec<(FullCorrelationInequality, usize)> = Vec::new();
    for (i, ineq) in ineqs.iter().enumerate() {
        let canon = equivalence::canonical_form(ineq, limits)?;
        match index.iter().find(|(c, _)| c.same_form(&canon)) {
            Some((_, first)) => classes.get_mut(first).expect("class exists").push(i),
            None => {
                index.push((canon, i));
                classes.insert(i, vec![i]);
            }
        }
    }
    Ok(classes.into_values().collect())
}

impl FacetList {
    /// Classes whose representative has more than one term.
    pub fn nontrivial_classes(&self) -> usize {
        self.orbit_classes
            .iter()
            .filter(|c| self.facets[c[0]].term_count() > 1)
            .count()
    }
}

/// `true` when `lr_max` equals the sum of moduli, i.e. one strategy realizes
/// every term's sign.
pub fn attains_algebraic_bound(ineq: &FullCorrelationInequality, limits: &Limits) -> Result<bool> {
    Ok(lr_bound(ineq, limits)? == ineq.algebraic_bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn chsh() -> FullCorrelationInequality {
        let h = Rational::new(1, 2);
        FullCorrelationInequality::new(
            Scenario::new(vec![2, 2]).unwrap(),
            vec![(vec![0, 0], h), (vec![0, 1], h), (vec![1, 0], h), (vec![1, 1], -h)],
            Rational::one(),
        )
        .unwrap()
    }

    #[test]
    fn vertex_counts() {
        let l = Limits::default();
        let s = Scenario::new(vec![2, 2]).unwrap();
        assert_eq!(enumerate_vertices(&s, true, &l).unwrap().count(), 8);
        assert_eq!(enumerate_vertices(&s, false, &l).unwrap().count(), 16);
        let one = Scenario::new(vec![1]).unwrap();
        let vs: Vec<Vertex> = enumerate_vertices(&one, true, &l).unwrap().collect();
        assert_eq!(vs.len(), 1);
        assert_eq!(vs[0].outcome(0, 0), 1);
        let eight = Scenario::uniform(8, 2).unwrap();
        assert_eq!(enumerate_vertices(&eight, true, &l).unwrap().count(), 32768);
    }

    #[test]
    fn reduced_stream_fixes_first_outcome() {
        let l = Limits::default();
        let s = Scenario::new(vec![2, 3]).unwrap();
        assert!(enumerate_vertices(&s, true, &l)
            .unwrap()
            .all(|v| v.outcome(0, 0) == 1));
    }

    #[test]
    fn cap_refusal_reports_requirement() {
        let l = Limits {
            enumeration_cap: 3,
            ..Limits::default()
        };
        let s = Scenario::new(vec![2, 2]).unwrap();
        match enumerate_vertices(&s, true, &l) {
            Err(Error::Refused { required, cap, .. }) => assert_eq!((required, cap), (4, 3)),
            other => panic!("unexpected {:?}", other.map(|v| v.count())),
        }
        assert!(lr_bound(&chsh(), &l).unwrap_err().is_refusal());
    }

    #[test]
    fn chsh_bound_and_facet() {
        let l = Limits::default();
        assert_eq!(lr_bound(&chsh(), &l).unwrap(), Rational::one());
        let r = tightness(&chsh(), &l).unwrap();
        assert!(r.is_face && r.is_facet);
        assert_eq!(r.rank, 4);
        assert_eq!(r.saturating_count, 8);
    }

    #[test]
    fn single_product_term() {
        let l = Limits::default();
        let s = Scenario::new(vec![1, 1]).unwrap();
        let ineq = FullCorrelationInequality::new(s, vec![(vec![0, 0], Rational::one())], Rational::one()).unwrap();
        assert_eq!(lr_bound(&ineq, &l).unwrap(), Rational::one());
        assert!(tightness(&ineq, &l).unwrap().is_facet);
    }

    #[test]
    fn half_sum_is_face_not_facet() {
        let l = Limits::default();
        let h = Rational::new(1, 2);
        let ineq = FullCorrelationInequality::new(
            Scenario::new(vec![2, 2]).unwrap(),
            vec![(vec![0, 0], h), (vec![0, 1], h)],
            Rational::one(),
        )
        .unwrap();
        let r = tightness(&ineq, &l).unwrap();
        assert!(r.is_face);
        assert!(!r.is_facet);
        assert!(r.rank < 4);
    }

    #[test]
    fn facets_of_segment() {
        let l = Limits::default();
        let list = enumerate_facets(&Scenario::new(vec![1, 1]).unwrap(), &l).unwrap();
        assert_eq!(list.facets.len(), 2);
        assert_eq!(list.orbit_classes.len(), 1);
    }

    #[test]
    fn facet_list_json_roundtrip() {
        let l = Limits::default();
        let list = enumerate_facets(&Scenario::new(vec![2, 2]).unwrap(), &l).unwrap();
        let text = serde_json::to_string(&list).unwrap();
        let back: FacetList = serde_json::from_str(&text).unwrap();
        assert_eq!(back, list);
    }

    #[test]
    fn tightness_report_json() {
        let l = Limits::default();
        let r = tightness(&chsh(), &l).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"lr_max\":\"1/1\""));
        assert_eq!(serde_json::from_str::<TightnessReport>(&text).unwrap(), r);
    }
}
