//! The equivalence group (sign flips of observables, permutations of a
//! party's settings, permutations of parties with equal setting counts),
//! canonical forms, and conversions between full-correlation and general
//! inequalities.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::model::{
    FullCorrelationInequality, GeneralInequality, PartialTuple, Rational, Scenario, SettingTuple,
};
use crate::polytope;

/// An element of the equivalence group acting on inequalities of a fixed
/// scenario.
///
/// New party `p` takes the role of original party `parties[p]`; its new
/// setting `k` is the original setting `settings[p][k]` with observable sign
/// `signs[p][k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    parties: Vec<usize>,
    settings: Vec<Vec<usize>>,
    signs: Vec<Vec<i8>>,
}

impl GroupElement {
    pub fn new(parties: Vec<usize>, settings: Vec<Vec<usize>>, signs: Vec<Vec<i8>>) -> Result<Self> {
        let n = parties.len();
        if settings.len() != n || signs.len() != n || !is_permutation(&parties) {
            return Err(Error::InvalidArgument("malformed group element".into()));
        }
        for (p, (perm, sign)) in settings.iter().zip(&signs).enumerate() {
            if !is_permutation(perm) || perm.len() != sign.len() {
                return Err(Error::InvalidArgument(format!(
                    "malformed setting permutation for party {}",
                    p + 1
                )));
            }
            if sign.iter().any(|&s| s != 1 && s != -1) {
                return Err(Error::InvalidArgument("signs must be ±1".into()));
            }
        }
        Ok(GroupElement {
            parties,
            settings,
            signs,
        })
    }

    pub fn identity(scenario: &Scenario) -> Self {
        let m = scenario.settings_per_party();
        GroupElement {
            parties: (0..m.len()).collect(),
            settings: m.iter().map(|&k| (0..k).collect()).collect(),
            signs: m.iter().map(|&k| vec![1; k]).collect(),
        }
    }

    /// Flips the sign of one observable.
    pub fn sign_flip(scenario: &Scenario, party: usize, setting: usize) -> Result<Self> {
        let mut g = Self::identity(scenario);
        *g.signs
            .get_mut(party)
            .and_then(|s| s.get_mut(setting))
            .ok_or_else(|| Error::InvalidArgument("sign flip out of range".into()))? = -1;
        Ok(g)
    }

    /// Exchanges two parties with equal setting counts.
    pub fn party_swap(scenario: &Scenario, a: usize, b: usize) -> Result<Self> {
        let mut g = Self::identity(scenario);
        g.parties.swap(a, b);
        g.check(scenario)?;
        Ok(g)
    }

    /// Uniformly random element for a scenario.
    pub fn random<R: Rng + ?Sized>(scenario: &Scenario, rng: &mut R) -> Self {
        let m = scenario.settings_per_party();
        let mut parties: Vec<usize> = (0..m.len()).collect();
        let mut by_count: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (p, &k) in m.iter().enumerate() {
            by_count.entry(k).or_default().push(p);
        }
        for group in by_count.values() {
            let mut shuffled = group.clone();
            shuffled.shuffle(rng);
            for (&slot, &orig) in group.iter().zip(&shuffled) {
                parties[slot] = orig;
            }
        }
        let settings = m
            .iter()
            .map(|&k| {
                let mut perm: Vec<usize> = (0..k).collect();
                perm.shuffle(rng);
                perm
            })
            .collect();
        let signs = m
            .iter()
            .map(|&k| (0..k).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect())
            .collect();
        GroupElement {
            parties,
            settings,
            signs,
        }
    }

    /// Whether the element acts on the given scenario.
    pub fn check(&self, scenario: &Scenario) -> Result<()> {
        let m = scenario.settings_per_party();
        let ok = self.parties.len() == m.len()
            && self
                .parties
                .iter()
                .enumerate()
                .all(|(p, &q)| m[p] == m[q] && self.settings[p].len() == m[p]);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "group element does not act on scenario {}",
                scenario
            )))
        }
    }

    /// `self.compose(h)` acts as `h` first, then `self`.
    pub fn compose(&self, h: &GroupElement) -> GroupElement {
        let n = self.parties.len();
        let mut parties = Vec::with_capacity(n);
        let mut settings = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for p in 0..n {
            let q = self.parties[p];
            parties.push(h.parties[q]);
            settings.push(self.settings[p].iter().map(|&l| h.settings[q][l]).collect());
            signs.push(
                self.settings[p]
                    .iter()
                    .zip(&self.signs[p])
                    .map(|(&l, &s)| s * h.signs[q][l])
                    .collect(),
            );
        }
        GroupElement {
            parties,
            settings,
            signs,
        }
    }

    pub fn inverse(&self) -> GroupElement {
        let n = self.parties.len();
        let mut parties = vec![0; n];
        for (p, &q) in self.parties.iter().enumerate() {
            parties[q] = p;
        }
        let mut settings = Vec::with_capacity(n);
        let mut signs = Vec::with_capacity(n);
        for &q in &parties {
            let perm = &self.settings[q];
            let mut inv = vec![0; perm.len()];
            for (k, &j) in perm.iter().enumerate() {
                inv[j] = k;
            }
            signs.push(inv.iter().map(|&k| self.signs[q][k]).collect());
            settings.push(inv);
        }
        GroupElement {
            parties,
            settings,
            signs,
        }
    }

    /// Image of an original setting tuple, with the accumulated sign.
    fn map_tuple(&self, t: &[usize], inverse_settings: &[Vec<usize>]) -> (SettingTuple, i8) {
        let mut sign = 1i8;
        let u = (0..self.parties.len())
            .map(|p| {
                let k = inverse_settings[p][t[self.parties[p]]];
                sign *= self.signs[p][k];
                k
            })
            .collect();
        (u, sign)
    }
}

fn is_permutation(v: &[usize]) -> bool {
    let mut seen = vec![false; v.len()];
    v.iter().all(|&x| x < v.len() && !std::mem::replace(&mut seen[x], true))
}

/// Applies a group element: relabels and re-signs coefficients exactly.
pub fn act(g: &GroupElement, ineq: &FullCorrelationInequality) -> Result<FullCorrelationInequality> {
    g.check(ineq.scenario())?;
    let inverse_settings: Vec<Vec<usize>> = g
        .settings
        .iter()
        .map(|perm| {
            let mut inv = vec![0; perm.len()];
            for (k, &j) in perm.iter().enumerate() {
                inv[j] = k;
            }
            inv
        })
        .collect();
    let terms = ineq
        .terms()
        .iter()
        .map(|(t, c)| {
            let (u, sign) = g.map_tuple(t, &inverse_settings);
            (u, if sign > 0 { *c } else { -*c })
        })
        .collect();
    Ok(ineq.with_terms(terms))
}

/// Orbit invariants usable when the canonical-form guard refuses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub settings: Vec<usize>,
    pub term_count: usize,
    pub moduli: Vec<Rational>,
    pub lr_bound: Rational,
}

pub fn fingerprint(ineq: &FullCorrelationInequality, limits: &Limits) -> Result<Fingerprint> {
    let mut settings = ineq.scenario().settings_per_party().to_vec();
    settings.sort_unstable();
    let mut moduli: Vec<Rational> = ineq.terms().values().map(|c| c.abs()).collect();
    moduli.sort();
    Ok(Fingerprint {
        settings,
        term_count: ineq.term_count(),
        moduli,
        lr_bound: polytope::lr_bound(ineq, limits)?,
    })
}

/// Lexicographically minimal dense coefficient vector over the orbit.
pub fn canonical_form(
    ineq: &FullCorrelationInequality,
    limits: &Limits,
) -> Result<FullCorrelationInequality> {
    Ok(canonicalize(ineq, limits)?.0)
}

/// Canonical form together with an element mapping the input onto it.
pub fn canonicalize(
    ineq: &FullCorrelationInequality,
    limits: &Limits,
) -> Result<(FullCorrelationInequality, GroupElement)> {
    let scenario = ineq.scenario();
    let required = scenario.total_settings();
    if required > limits.canonical_cap {
        return Err(Error::Refused {
            what: format!("canonical form over scenario {}", scenario),
            required,
            cap: limits.canonical_cap,
        });
    }
    let mut search = Search::new(ineq);
    search.run();
    let (_, g) = search.best.expect("the orbit is never empty");
    Ok((act(&g, ineq)?.with_unit_scale(), g))
}

/// Whether two inequalities over the same scenario are equivalent. Inputs
/// over different scenarios are never equivalent.
pub fn equivalent(
    a: &FullCorrelationInequality,
    b: &FullCorrelationInequality,
    limits: &Limits,
) -> Result<bool> {
    if a.scenario() != b.scenario() || a.bound() != b.bound() || a.term_count() != b.term_count() {
        return Ok(false);
    }
    Ok(canonical_form(a, limits)?.same_form(&canonical_form(b, limits)?))
}

/// Branch-and-bound search for the lexicographically minimal image.
///
/// The first entry only depends on which original tuple is sent to
/// `(0, .., 0)`, so that tuple is chosen first among the terms of largest
/// modulus. The remaining slots are filled from the last party backwards:
/// slot `(p, k)` fixes the block of entries with parties `< p` at setting 0
/// and party `p` at `k`. A new party is matched with an original one when its
/// second setting is placed. Parties with a single setting never affect the
/// vector and are matched at the leaves.
///
/// Signs are not branched on. Flipping all observables of two parties at once
/// is the identity on full-correlation inequalities, so every first setting
/// keeps sign +1 and a single global sign is carried instead. The sign of an
/// entry is then a parity of sign variables, and the lexicographic minimum
/// makes each nonzero entry negative whenever that parity is still free. The
/// decided parities are kept as a GF(2) system in echelon form.
struct Search<'a> {
    scenario: &'a Scenario,
    // coefficients times a common denominator
    dense: Vec<i128>,
    nonzero: Vec<(SettingTuple, Rational)>,
    n: usize,
    m: Vec<usize>,
    // suffix strides: stride[p] = prod_{q > p} m_q
    stride: Vec<usize>,
    base: Vec<usize>,
    base_index: usize,
    parties: Vec<Option<usize>>,
    settings: Vec<Vec<usize>>,
    // bit of the sign variable for setting k >= 1 of new party p; bit 0 is global
    var: Vec<Vec<u32>>,
    used_party: Vec<bool>,
    used_setting: Vec<Vec<bool>>,
    rows: Vec<(u64, bool)>,
    prefix: Vec<i128>,
    u: Vec<usize>,
    best: Option<(Vec<i128>, GroupElement)>,
    version: u64,
}

impl<'a> Search<'a> {
    fn new(ineq: &'a FullCorrelationInequality) -> Self {
        let scenario = ineq.scenario();
        let m = scenario.settings_per_party().to_vec();
        let n = m.len();
        let mut stride = vec![1; n];
        for p in (0..n.saturating_sub(1)).rev() {
            stride[p] = stride[p + 1] * m[p + 1];
        }
        let denominator = ineq
            .terms()
            .values()
            .fold(1i64, |acc, c| num_integer::lcm(acc, *c.denom()));
        let dense = ineq
            .dense()
            .iter()
            .map(|c| i128::from(*c.numer()) * i128::from(denominator / c.denom()))
            .collect();
        let mut next = 1;
        let var = m
            .iter()
            .map(|&k| {
                (0..k)
                    .map(|i| {
                        if i == 0 {
                            return 0;
                        }
                        next += 1;
                        next - 1
                    })
                    .collect()
            })
            .collect();
        assert!(next <= 64, "too many sign variables");
        Search {
            scenario,
            dense,
            nonzero: ineq.terms().iter().map(|(t, c)| (t.clone(), *c)).collect(),
            n,
            stride,
            base: vec![0; n],
            base_index: 0,
            parties: vec![None; n],
            settings: m.iter().map(|&k| vec![usize::MAX; k]).collect(),
            var,
            used_party: vec![false; n],
            used_setting: m.iter().map(|&k| vec![false; k]).collect(),
            rows: Vec::new(),
            prefix: Vec::with_capacity(scenario.dimension()),
            u: vec![0; n],
            m,
            best: None,
            version: 0,
        }
    }

    fn run(&mut self) {
        let Some(top) = self.nonzero.iter().map(|(_, c)| c.abs()).max() else {
            let zero = vec![0; self.dense.len()];
            self.best = Some((zero, GroupElement::identity(self.scenario)));
            return;
        };
        let starts: Vec<SettingTuple> = self
            .nonzero
            .iter()
            .filter(|(_, c)| c.abs() == top)
            .map(|(t, _)| t.clone())
            .collect();
        for t in starts {
            self.base_index = self.scenario.tuple_index(&t);
            self.base = t;
            for (q, &j) in self.base.iter().enumerate() {
                self.used_setting[q][j] = true;
            }
            self.rows.clear();
            let first = self.entry(self.base_index, 1);
            self.prefix.push(first);
            let tied = self.best.is_some();
            self.phase_two(self.slot_after(self.n - 1, 0), tied);
            self.prefix.pop();
            for (q, &j) in self.base.iter().enumerate() {
                self.used_setting[q][j] = false;
            }
        }
    }

    /// Next slot after `(p, k)`, or `None` when all are filled.
    fn slot_after(&self, p: usize, k: usize) -> Option<(usize, usize)> {
        let (mut p, mut k) = (p, k + 1);
        loop {
            if k < self.m[p] {
                return Some((p, k));
            }
            if p == 0 {
                return None;
            }
            p -= 1;
            k = 1;
        }
    }

    /// Value of an entry whose sign is the parity of `mask`, deciding that
    /// parity when it is still free.
    fn entry(&mut self, index: usize, mask: u64) -> i128 {
        let c = self.dense[index];
        if c == 0 {
            return 0;
        }
        let (mut mask, mut parity) = (mask, false);
        for &(row, rhs) in &self.rows {
            if mask & row & row.wrapping_neg() != 0 {
                mask ^= row;
                parity ^= rhs;
            }
        }
        if mask == 0 {
            return if parity { -c } else { c };
        }
        self.rows.push((mask, parity ^ (c > 0)));
        -c.abs()
    }

    fn block(&mut self, p: usize, k: usize, out: &mut Vec<i128>) {
        out.clear();
        self.u.iter_mut().for_each(|x| *x = 0);
        self.u[p] = k;
        for _ in 0..self.stride[p] {
            let mut index = self.base_index as isize;
            let mut mask = 1u64;
            for r in p..self.n {
                let ur = self.u[r];
                if ur == 0 {
                    continue;
                }
                let q = self.parties[r].expect("settings beyond the first are placed");
                index += (self.settings[r][ur] as isize - self.base[q] as isize)
                    * self.stride[q] as isize;
                mask ^= 1 << self.var[r][ur];
            }
            let value = self.entry(index as usize, mask);
            out.push(value);
            for r in (p + 1..self.n).rev() {
                self.u[r] += 1;
                if self.u[r] < self.m[r] {
                    break;
                }
                self.u[r] = 0;
            }
        }
    }

    fn phase_two(&mut self, slot: Option<(usize, usize)>, tied: bool) {
        let Some((p, k)) = slot else {
            self.leaf(tied);
            return;
        };
        let candidates: Vec<usize> = match self.parties[p] {
            Some(q) if k > 1 => vec![q],
            _ => (0..self.n)
                .filter(|&q| !self.used_party[q] && self.m[q] == self.m[p])
                .collect(),
        };
        let start = self.prefix.len();
        let saved = self.rows.len();
        let mut options: Vec<(Vec<i128>, usize, usize, Vec<(u64, bool)>)> = Vec::new();
        for &q in &candidates {
            self.parties[p] = Some(q);
            self.settings[p][0] = self.base[q];
            for j in 0..self.m[q] {
                if self.used_setting[q][j] {
                    continue;
                }
                self.settings[p][k] = j;
                let mut block = Vec::with_capacity(self.stride[p]);
                self.block(p, k, &mut block);
                options.push((block, q, j, self.rows.split_off(saved)));
            }
        }
        options.sort_by(|a, b| a.0.cmp(&b.0));
        let mut tied = tied;
        for (block, q, j, rows) in options {
            let mut child_tied = false;
            if tied {
                let best = &self.best.as_ref().expect("tied implies a best").0;
                let segment = &best[start..start + block.len()];
                if block.as_slice() > segment {
                    // Options are sorted, so the rest are larger too.
                    break;
                }
                child_tied = block.as_slice() == segment;
            }
            self.parties[p] = Some(q);
            self.settings[p][0] = self.base[q];
            self.settings[p][k] = j;
            self.used_setting[q][j] = true;
            if k == 1 {
                self.used_party[q] = true;
            }
            self.rows.extend(rows);
            self.prefix.extend_from_slice(&block);
            let before = self.version;
            self.phase_two(self.slot_after(p, k), child_tied);
            if self.version != before {
                // The new best extends the current prefix.
                tied = true;
            }
            self.prefix.truncate(start);
            self.rows.truncate(saved);
            self.used_setting[q][j] = false;
            if k == 1 {
                self.used_party[q] = false;
            }
        }
        self.settings[p][k] = usize::MAX;
        if k == 1 {
            self.parties[p] = None;
            self.settings[p][0] = usize::MAX;
        }
    }

    /// One solution of the sign system, free variables set to +1.
    fn solve_signs(&self) -> u64 {
        let mut x = 0u64;
        for &(row, rhs) in self.rows.iter().rev() {
            let pivot = row & row.wrapping_neg();
            let parity = ((row ^ pivot) & x).count_ones() % 2 == 1;
            if parity != rhs {
                x |= pivot;
            }
        }
        x
    }

    fn leaf(&mut self, tied: bool) {
        if tied {
            return;
        }
        let x = self.solve_signs();
        let sign = |bit: u32| if x >> bit & 1 == 1 { -1i8 } else { 1 };
        let mut spare = (0..self.n).filter(|&q| !self.used_party[q]);
        let mut parties = Vec::with_capacity(self.n);
        let mut settings = self.settings.clone();
        let mut signs = Vec::with_capacity(self.n);
        for p in 0..self.n {
            let q = match self.parties[p] {
                Some(q) => q,
                None => spare.next().expect("single-setting parties remain"),
            };
            parties.push(q);
            settings[p][0] = self.base[q];
            let global = if p == 0 { sign(0) } else { 1 };
            signs.push(
                (0..self.m[p])
                    .map(|k| global * if k == 0 { 1 } else { sign(self.var[p][k]) })
                    .collect(),
            );
        }
        let g = GroupElement {
            parties,
            settings,
            signs,
        };
        self.best = Some((self.prefix.clone(), g));
        self.version += 1;
    }
}

/// Substitutes the constant +1 for chosen observables, producing a general
/// inequality over the scenario with those settings removed.
///
/// `fixed` lists `(party, setting)` pairs, 0-based, at most one per party.
/// Coefficients and bound are returned in the inequality's original scale.
pub fn dehomogenize(
    ineq: &FullCorrelationInequality,
    fixed: &[(usize, usize)],
) -> Result<GeneralInequality> {
    let scenario = ineq.scenario();
    let mut chosen: Vec<Option<usize>> = vec![None; scenario.parties()];
    for &(p, i) in fixed {
        if p >= scenario.parties() || i >= scenario.settings(p) {
            return Err(Error::InvalidArgument(format!(
                "cannot fix setting {} of party {}",
                i + 1,
                p + 1
            )));
        }
        if chosen[p].replace(i).is_some() {
            return Err(Error::InvalidArgument(format!(
                "party {} is fixed twice",
                p + 1
            )));
        }
        if scenario.settings(p) == 1 {
            return Err(Error::InvalidArgument(format!(
                "party {} has a single setting; fixing it would remove the party",
                p + 1
            )));
        }
    }
    let settings: Vec<usize> = scenario
        .settings_per_party()
        .iter()
        .zip(&chosen)
        .map(|(&m, c)| m - usize::from(c.is_some()))
        .collect();
    let reduced = Scenario::new(settings)?;
    let mut constant = Rational::zero();
    let mut terms: Vec<(PartialTuple, Rational)> = Vec::new();
    for (t, c) in ineq.terms() {
        let c = *c * ineq.scale();
        let key: PartialTuple = t
            .iter()
            .zip(&chosen)
            .map(|(&i, fix)| match fix {
                Some(f) if i == *f => None,
                Some(f) if i > *f => Some(i - 1),
                _ => Some(i),
            })
            .collect();
        if key.iter().all(Option::is_none) {
            constant += c;
        } else {
            terms.push((key, c));
        }
    }
    GeneralInequality::new(reduced, terms, constant, ineq.original_bound())
}

/// Parties that receive an auxiliary setting under [`homogenize`], with its
/// 0-based index (appended after the existing settings).
pub fn homogenization_auxiliaries(g: &GeneralInequality) -> Vec<(usize, usize)> {
    let scenario = g.scenario();
    (0..scenario.parties())
        .filter(|&p| !g.constant().is_zero() || g.terms().keys().any(|t| t[p].is_none()))
        .map(|p| (p, scenario.settings(p)))
        .collect()
}

/// Adds one auxiliary observable per party that is missing from some term
/// (or from the constant) and multiplies it in, yielding a full-correlation
/// inequality with the same bound.
pub fn homogenize(g: &GeneralInequality) -> Result<FullCorrelationInequality> {
    let scenario = g.scenario();
    let aux = homogenization_auxiliaries(g);
    let mut settings = scenario.settings_per_party().to_vec();
    for &(p, _) in &aux {
        settings[p] += 1;
    }
    let extended = Scenario::new(settings)?;
    let mut terms: Vec<(SettingTuple, Rational)> = g
        .terms()
        .iter()
        .map(|(t, c)| {
            let key = t
                .iter()
                .enumerate()
                .map(|(p, i)| i.unwrap_or(scenario.settings(p)))
                .collect();
            (key, *c)
        })
        .collect();
    if !g.constant().is_zero() {
        terms.push((scenario.settings_per_party().to_vec(), g.constant()));
    }
    FullCorrelationInequality::new(extended, terms, g.bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    fn chsh() -> FullCorrelationInequality {
        let h = r(1, 2);
        FullCorrelationInequality::new(
            Scenario::new(vec![2, 2]).unwrap(),
            vec![(vec![0, 0], h), (vec![0, 1], h), (vec![1, 0], h), (vec![1, 1], -h)],
            r(1, 1),
        )
        .unwrap()
    }

    fn wzg3() -> FullCorrelationInequality {
        let h = r(1, 2);
        FullCorrelationInequality::new(
            Scenario::uniform(3, 2).unwrap(),
            vec![
                (vec![0, 0, 0], h),
                (vec![0, 1, 1], -h),
                (vec![1, 0, 1], -h),
                (vec![1, 1, 0], -h),
            ],
            r(1, 1),
        )
        .unwrap()
    }

    #[test]
    fn identity_acts_trivially() {
        let g = GroupElement::identity(chsh().scenario());
        assert_eq!(act(&g, &chsh()).unwrap(), chsh().without_name());
    }

    #[test]
    fn sign_flip_on_b2() {
        let g = GroupElement::sign_flip(chsh().scenario(), 1, 1).unwrap();
        let flipped = act(&g, &chsh()).unwrap();
        assert_eq!(flipped.coefficient(&[0, 1]), r(-1, 2));
        assert_eq!(flipped.coefficient(&[1, 1]), r(1, 2));
        assert_eq!(flipped.coefficient(&[0, 0]), r(1, 2));
    }

    #[test]
    fn party_swap_fixes_symmetric_inequality() {
        let g = GroupElement::party_swap(wzg3().scenario(), 0, 1).unwrap();
        assert!(act(&g, &wzg3()).unwrap().same_form(&wzg3()));
        let uneven = Scenario::new(vec![2, 3]).unwrap();
        assert!(GroupElement::party_swap(&uneven, 0, 1).is_err());
    }

    #[test]
    fn group_axioms_on_random_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = Scenario::new(vec![2, 3, 2]).unwrap();
        let dense: Vec<Rational> = (0..s.dimension()).map(|i| r(i as i64 - 5, 3)).collect();
        let x = FullCorrelationInequality::from_dense(s.clone(), &dense).unwrap();
        for _ in 0..50 {
            let g = GroupElement::random(&s, &mut rng);
            let h = GroupElement::random(&s, &mut rng);
            let gh = g.compose(&h);
            assert_eq!(act(&gh, &x).unwrap(), act(&g, &act(&h, &x).unwrap()).unwrap());
            assert_eq!(act(&g.inverse(), &act(&g, &x).unwrap()).unwrap(), x);
            assert_eq!(g.compose(&g.inverse()), GroupElement::identity(&s));
        }
    }

    #[test]
    fn canonical_form_is_orbit_constant() {
        let l = Limits::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for base in [chsh(), wzg3()] {
            let canon = canonical_form(&base, &l).unwrap();
            assert!(canonical_form(&canon, &l).unwrap().same_form(&canon));
            for _ in 0..20 {
                let g = GroupElement::random(base.scenario(), &mut rng);
                let moved = act(&g, &base).unwrap();
                assert!(canonical_form(&moved, &l).unwrap().same_form(&canon));
            }
        }
    }

    #[test]
    fn canonicalize_returns_witness() {
        let l = Limits::default();
        let (canon, g) = canonicalize(&wzg3(), &l).unwrap();
        assert!(act(&g, &wzg3()).unwrap().same_form(&canon));
        assert_eq!(canon.coefficient(&[0, 0, 0]), r(-1, 2));
    }

    #[test]
    fn canonical_guard() {
        let l = Limits {
            canonical_cap: 3,
            ..Limits::default()
        };
        assert!(canonical_form(&chsh(), &l).unwrap_err().is_refusal());
        let fp = fingerprint(&chsh(), &l).unwrap();
        assert_eq!(fp.term_count, 4);
        assert_eq!(fp.lr_bound, r(1, 1));
    }

    #[test]
    fn not_equivalent_across_term_counts() {
        let l = Limits::default();
        let single = FullCorrelationInequality::new(
            chsh().scenario().clone(),
            vec![(vec![0, 0], r(1, 1))],
            r(1, 1),
        )
        .unwrap();
        assert!(!equivalent(&chsh(), &single, &l).unwrap());
        let g = GroupElement::sign_flip(chsh().scenario(), 0, 1).unwrap();
        assert!(equivalent(&chsh(), &act(&g, &chsh()).unwrap(), &l).unwrap());
    }

    #[test]
    fn dehomogenize_chsh_b2() {
        let g = dehomogenize(&chsh(), &[(1, 1)]).unwrap();
        assert_eq!(g.scenario().settings_per_party(), &[2, 1]);
        assert_eq!(g.terms().len(), 4);
        assert_eq!(g.terms()[&vec![Some(0), None]], r(1, 2));
        assert_eq!(g.terms()[&vec![Some(1), None]], r(-1, 2));
        assert_eq!(g.constant(), r(0, 1));
        assert_eq!(g.bound(), r(1, 1));
        assert!(dehomogenize(&chsh(), &[]).unwrap().to_full().unwrap().same_form(&chsh()));
        assert!(dehomogenize(&chsh(), &[(1, 1), (1, 0)]).is_err());
        assert!(dehomogenize(&chsh(), &[(2, 0)]).is_err());
    }

    #[test]
    fn homogenize_back_to_chsh() {
        let g = dehomogenize(&chsh(), &[(1, 1)]).unwrap();
        let h = homogenize(&g).unwrap();
        assert!(h.same_form(&chsh()));
        assert_eq!(homogenization_auxiliaries(&g), vec![(1, 1)]);
    }

    #[test]
    fn homogenize_constant_only() {
        let s = Scenario::new(vec![2, 1]).unwrap();
        let g = GeneralInequality::new(s, vec![], r(1, 1), r(1, 1)).unwrap();
        let h = homogenize(&g).unwrap();
        assert_eq!(h.scenario().settings_per_party(), &[3, 2]);
        assert_eq!(h.term_count(), 1);
        assert_eq!(h.coefficient(&[2, 1]), r(1, 1));
    }
}
