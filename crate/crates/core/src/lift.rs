//! Splitting an inequality along one party and lifting faces of a smaller
//! polytope to a polytope with one more party.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::equivalence;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{FullCorrelationInequality, Rational, Scenario, SettingTuple};
use crate::polytope::{self, TightnessReport};

/// The components `f_1..f_N` of an inequality along one party: `f_k` holds
/// the terms in which the party uses setting `k`, with that factor removed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartyDecomposition {
    pub party: usize,
    pub components: Vec<FullCorrelationInequality>,
}

pub fn decompose(ineq: &FullCorrelationInequality, party: usize) -> Result<PartyDecomposition> {
    let scenario = ineq.scenario();
    if party >= scenario.parties() {
        return Err(Error::InvalidArgument(format!(
            "party {} out of range for scenario {}",
            party + 1,
            scenario
        )));
    }
    let rest = scenario.without_party(party).ok_or_else(|| {
        Error::InvalidArgument("cannot decompose a single-party inequality".into())
    })?;
    let mut parts: Vec<BTreeMap<SettingTuple, Rational>> =
        vec![BTreeMap::new(); scenario.settings(party)];
    for (t, c) in ineq.terms() {
        let mut key = t.clone();
        let k = key.remove(party);
        parts[k].insert(key, *c);
    }
    Ok(PartyDecomposition {
        party,
        components: parts
            .into_iter()
            .map(|terms| FullCorrelationInequality::normalized(rest.clone(), terms, ineq.bound()))
            .collect(),
    })
}

fn combine(
    scenario: &Scenario,
    parts: impl IntoIterator<Item = (Rational, BTreeMap<SettingTuple, Rational>)>,
) -> BTreeMap<SettingTuple, Rational> {
    let mut acc: BTreeMap<SettingTuple, Rational> = BTreeMap::new();
    for (w, terms) in parts {
        if w.is_zero() {
            continue;
        }
        for (t, c) in terms {
            debug_assert!(scenario.is_valid_tuple(&t));
            *acc.entry(t).or_insert_with(Rational::zero) += w * c;
        }
    }
    acc.retain(|_, c| !c.is_zero());
    acc
}

/// `f_1 + .. + f_N`, then `f_1 + .. - f_k + .. + f_N` for `k = 2..N`.
pub fn structure_values(d: &PartyDecomposition) -> Vec<FullCorrelationInequality> {
    let Some(first) = d.components.first() else {
        return Vec::new();
    };
    let scenario = first.scenario();
    let total = combine(
        scenario,
        d.components.iter().map(|f| (Rational::one(), f.terms().clone())),
    );
    let mut out = vec![first.with_terms(total.clone())];
    for f in &d.components[1..] {
        let terms = combine(
            scenario,
            [
                (Rational::one(), total.clone()),
                (Rational::from_integer(-2), f.terms().clone()),
            ],
        );
        out.push(first.with_terms(terms));
    }
    out
}

/// Weight of face `i` in the coefficient of the new party's setting `k`.
fn lift_weight(n: usize, k: usize, i: usize) -> Rational {
    let half = Rational::new(1, 2);
    match (n, k, i) {
        (1, _, _) => Rational::one(),
        (_, 0, 0) => Rational::new(3 - n as i64, 2),
        (_, 0, _) => half,
        (_, _, 0) => half,
        (_, k, i) if k == i => -half,
        _ => Rational::zero(),
    }
}

/// Lifts faces `B_1..B_N` of a common scenario, inserting a party with `N`
/// settings at `position`.
pub fn lift_at(faces: &[FullCorrelationInequality], position: usize) -> Result<FullCorrelationInequality> {
    let first = faces
        .first()
        .ok_or_else(|| Error::InvalidArgument("no faces to lift".into()))?;
    let scenario = first.scenario();
    for f in &faces[1..] {
        scenario.check_same(f.scenario())?;
        if f.bound() != first.bound() {
            return Err(Error::InvalidArgument("faces have different bounds".into()));
        }
    }
    let n = faces.len();
    let extended = scenario.with_party(position, n)?;
    let mut terms: BTreeMap<SettingTuple, Rational> = BTreeMap::new();
    for k in 0..n {
        let part = combine(
            scenario,
            faces
                .iter()
                .enumerate()
                .map(|(i, f)| (lift_weight(n, k, i), f.terms().clone())),
        );
        for (mut t, c) in part {
            t.insert(position, k);
            terms.insert(t, c);
        }
    }
    Ok(FullCorrelationInequality::normalized(extended, terms, first.bound()))
}

/// Whether a lift was checked against every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verification {
    Verified { report: TightnessReport },
    Unverified { reason: String },
    NotRequested,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftOutcome {
    pub inequality: FullCorrelationInequality,
    pub verification: Verification,
}

impl LiftOutcome {
    pub fn report(&self) -> Option<&TightnessReport> {
        match &self.verification {
            Verification::Verified { report } => Some(report),
            _ => None,
        }
    }

    pub fn is_facet(&self) -> Option<bool> {
        self.report().map(|r| r.is_facet)
    }
}

/// Lifts faces of bound 1 with the new party appended last. With `verify`,
/// the result is checked exhaustively unless the enumeration cap refuses,
/// in which case it is marked unverified.
pub fn compose_lift(
    faces: &[FullCorrelationInequality],
    verify: bool,
    limits: &Limits,
) -> Result<LiftOutcome> {
    for (k, f) in faces.iter().enumerate() {
        if f.bound() != Rational::one() {
            return Err(Error::InvalidArgument(format!(
                "face {} has normalized bound {}, expected 1",
                k + 1,
                f.bound()
            )));
        }
    }
    let position = faces.first().map_or(0, |f| f.scenario().parties());
    let inequality = lift_at(faces, position)?;
    let verification = if !verify {
        Verification::NotRequested
    } else {
        match polytope::tightness(&inequality, limits) {
            Ok(report) => Verification::Verified { report },
            Err(e) if e.is_refusal() => Verification::Unverified {
                reason: e.to_string(),
            },
            Err(e) => return Err(e),
        }
    };
    Ok(LiftOutcome {
        inequality,
        verification,
    })
}

/// `½(c_1 (B_1 + B_2) + c_2 (B_1 − B_2))`.
pub fn chsh_extend(
    b1: &FullCorrelationInequality,
    b2: &FullCorrelationInequality,
) -> Result<FullCorrelationInequality> {
    Ok(compose_lift(&[b1.clone(), b2.clone()], false, &Limits::default())?.inequality)
}

/// An inequality split along its last (two-setting) party, with the facet
/// status of both halves and of the inequality itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConverseReport {
    pub faces: [FullCorrelationInequality; 2],
    pub reports: [TightnessReport; 2],
    pub lifted: TightnessReport,
}

impl ConverseReport {
    /// The two-setting equivalence: facet iff both halves are facets.
    pub fn iff_holds(&self) -> bool {
        self.lifted.is_facet == (self.reports[0].is_facet && self.reports[1].is_facet)
    }
}

pub fn converse_check(ineq: &FullCorrelationInequality, limits: &Limits) -> Result<ConverseReport> {
    let scenario = ineq.scenario();
    let last = scenario.parties() - 1;
    if scenario.settings(last) != 2 {
        return Err(Error::InvalidArgument(
            "the last party must have exactly two settings".into(),
        ));
    }
    let values = structure_values(&decompose(ineq, last)?);
    let [b1, b2]: [FullCorrelationInequality; 2] =
        values.try_into().expect("two settings give two values");
    let reports = [polytope::tightness(&b1, limits)?, polytope::tightness(&b2, limits)?];
    Ok(ConverseReport {
        lifted: polytope::tightness(ineq, limits)?,
        faces: [b1, b2],
        reports,
    })
}

/// All pairs of term keys of an inequality, in term order.
pub fn flip_pairs(ineq: &FullCorrelationInequality) -> Vec<[SettingTuple; 2]> {
    let keys: Vec<&SettingTuple> = ineq.terms().keys().collect();
    let mut pairs = Vec::new();
    for i in 0..keys.len() {
        for j in i + 1..keys.len() {
            pairs.push([keys[i].clone(), keys[j].clone()]);
        }
    }
    pairs
}

/// Extends a 4-term inequality by one two-setting party using the copy with
/// `flip_pair` negated as `B_2`. Both inputs must be faces.
pub fn four_term_extend(
    ineq: &FullCorrelationInequality,
    flip_pair: &[SettingTuple],
    limits: &Limits,
) -> Result<FullCorrelationInequality> {
    if ineq.term_count() != 4 {
        return Err(Error::InvalidArgument(format!(
            "expected 4 terms, found {}",
            ineq.term_count()
        )));
    }
    if flip_pair.len() != 2 || flip_pair[0] == flip_pair[1] {
        return Err(Error::InvalidArgument(
            "flip pair must name two distinct terms".into(),
        ));
    }
    let mut flipped = ineq.terms().clone();
    for key in flip_pair {
        let c = flipped.get_mut(key).ok_or_else(|| {
            Error::InvalidArgument(format!("flip pair entry {:?} is not a term", key))
        })?;
        *c = -*c;
    }
    let b2 = ineq.with_terms(flipped);
    for (label, b) in [("input", ineq), ("flipped input", &b2)] {
        let lr = polytope::lr_bound(b, limits)?;
        if lr != b.bound() {
            return Err(Error::NotAFace(format!(
                "{} has local bound {} against bound {}",
                label,
                crate::model::rational::format(&lr),
                crate::model::rational::format(&b.bound())
            )));
        }
    }
    chsh_extend(ineq, &b2)
}

/// First flip pair whose extension is equivalent to `target`.
pub fn find_flip_pair(
    ineq: &FullCorrelationInequality,
    target: &FullCorrelationInequality,
    limits: &Limits,
) -> Result<Option<[SettingTuple; 2]>> {
    for pair in flip_pairs(ineq) {
        let lifted = match four_term_extend(ineq, &pair, limits) {
            Ok(l) => l,
            Err(Error::NotAFace(_)) => continue,
            Err(e) => return Err(e),
        };
        if equivalence::equivalent(&lifted, target, limits)? {
            return Ok(Some(pair));
        }
    }
    Ok(None)
}

/// Signs on the new party's observables after which one of the structure
/// values is a face of the smaller polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignChoice {
    pub signs: Vec<i8>,
    /// Index into the structure values of the re-signed decomposition.
    pub value: usize,
    pub face: FullCorrelationInequality,
}

/// Searches sign changes of one party's observables for a structure value
/// that is a face. `None` when no choice works.
pub fn face_sign_choice(
    ineq: &FullCorrelationInequality,
    party: usize,
    limits: &Limits,
) -> Result<Option<SignChoice>> {
    let d = decompose(ineq, party)?;
    let n = d.components.len();
    if n > 16 {
        return Err(Error::Refused {
            what: "sign search over party settings".into(),
            required: n,
            cap: 16,
        });
    }
    for mask in 0u32..1 << n {
        let signs: Vec<i8> = (0..n).map(|k| if mask >> k & 1 == 1 { -1 } else { 1 }).collect();
        let resigned = PartyDecomposition {
            party,
            components: d
                .components
                .iter()
                .zip(&signs)
                .map(|(f, &s)| {
                    let w = Rational::from_integer(s.into());
                    f.with_terms(f.terms().iter().map(|(t, c)| (t.clone(), *c * w)).collect())
                })
                .collect(),
        };
        for (value, face) in structure_values(&resigned).into_iter().enumerate() {
            if polytope::lr_bound(&face, limits)? == Rational::one() {
                return Ok(Some(SignChoice { signs, value, face }));
            }
        }
    }
    Ok(None)
}
