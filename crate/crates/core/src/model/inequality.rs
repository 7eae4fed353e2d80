use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use super::scenario::Scenario;
use super::vertex::Vertex;
use super::Rational;
use crate::error::{Error, Result};

/// Setting tuple, 0-based, one entry per party.
pub type SettingTuple = Vec<usize>;

/// A full-correlation (CHSH-type) inequality `sum_t alpha_t prod_p X_{p,t_p} <= bound`.
///
/// On construction coefficients are divided by `|bound|` when the bound is
/// nonzero, so faces sit at value 1. The divisor is kept as `scale` and the
/// original bound is `bound * scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullCorrelationInequality {
    scenario: Scenario,
    terms: BTreeMap<SettingTuple, Rational>,
    bound: Rational,
    scale: Rational,
    name: Option<String>,
}

impl FullCorrelationInequality {
    /// Builds and normalizes an inequality. Repeated keys are summed and zero
    /// coefficients dropped.
    pub fn new(
        scenario: Scenario,
        terms: impl IntoIterator<Item = (SettingTuple, Rational)>,
        bound: Rational,
    ) -> Result<Self> {
        let terms = collect_terms(&scenario, terms)?;
        Ok(Self::normalized(scenario, terms, bound))
    }

    /// Builds an inequality with bound 1 from a dense coefficient vector in
    /// mixed-radix tuple order.
    pub fn from_dense(scenario: Scenario, dense: &[Rational]) -> Result<Self> {
        if dense.len() != scenario.dimension() {
            return Err(Error::InvalidArgument(format!(
                "dense vector has {} entries, scenario dimension is {}",
                dense.len(),
                scenario.dimension()
            )));
        }
        let terms: Vec<_> = dense
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (scenario.tuple_at(i), *c))
            .collect();
        Self::new(scenario, terms, Rational::one())
    }

    pub(crate) fn normalized(
        scenario: Scenario,
        mut terms: BTreeMap<SettingTuple, Rational>,
        bound: Rational,
    ) -> Self {
        let (bound, scale) = if bound.is_zero() {
            (bound, Rational::one())
        } else {
            let scale = bound.abs();
            for c in terms.values_mut() {
                *c /= scale;
            }
            (bound / scale, scale)
        };
        FullCorrelationInequality {
            scenario,
            terms,
            bound,
            scale,
            name: None,
        }
    }

    /// Reassembles an already-normalized inequality (used by the parser).
    pub(crate) fn from_normalized_parts(
        scenario: Scenario,
        terms: BTreeMap<SettingTuple, Rational>,
        bound: Rational,
        scale: Rational,
    ) -> Self {
        FullCorrelationInequality {
            scenario,
            terms,
            bound,
            scale,
            name: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn without_name(mut self) -> Self {
        self.name = None;
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Normalized bound: 1, 0 or −1.
    pub fn bound(&self) -> Rational {
        self.bound
    }

    pub fn scale(&self) -> Rational {
        self.scale
    }

    /// The bound the inequality was constructed with.
    pub fn original_bound(&self) -> Rational {
        self.bound * self.scale
    }

    pub fn terms(&self) -> &BTreeMap<SettingTuple, Rational> {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, tuple: &[usize]) -> Rational {
        self.terms.get(tuple).copied().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients in mixed-radix tuple order.
    pub fn dense(&self) -> Vec<Rational> {
        let mut dense = vec![Rational::zero(); self.scenario.dimension()];
        for (t, c) in &self.terms {
            dense[self.scenario.tuple_index(t)] = *c;
        }
        dense
    }

    /// Sum of the moduli of all coefficients.
    pub fn algebraic_bound(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Value of the correlation expression at a deterministic strategy.
    pub fn evaluate(&self, vertex: &Vertex) -> Result<Rational> {
        if !vertex.belongs_to(&self.scenario) {
            return Err(Error::InvalidArgument(
                "vertex does not belong to the inequality's scenario".into(),
            ));
        }
        Ok(self
            .terms
            .iter()
            .map(|(t, c)| {
                if vertex.correlation(t) > 0 {
                    *c
                } else {
                    -*c
                }
            })
            .sum())
    }

    /// Same coefficients and bound, ignoring name and original scale.
    pub fn same_form(&self, other: &Self) -> bool {
        self.scenario == other.scenario && self.terms == other.terms && self.bound == other.bound
    }

    /// Copy with coefficients replaced; keeps bound and scale.
    pub(crate) fn with_terms(&self, terms: BTreeMap<SettingTuple, Rational>) -> Self {
        FullCorrelationInequality {
            scenario: self.scenario.clone(),
            terms,
            bound: self.bound,
            scale: self.scale,
            name: None,
        }
    }

    /// Drops the original-bound metadata.
    pub fn with_unit_scale(mut self) -> Self {
        self.scale = Rational::one();
        self
    }

    /// Generic inequality with every term covering all parties.
    pub fn to_general(&self) -> GeneralInequality {
        GeneralInequality {
            scenario: self.scenario.clone(),
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.iter().map(|&i| Some(i)).collect(), *c * self.scale))
                .collect(),
            constant: Rational::zero(),
            bound: self.original_bound(),
            name: self.name.clone(),
        }
    }
}

fn collect_terms(
    scenario: &Scenario,
    terms: impl IntoIterator<Item = (SettingTuple, Rational)>,
) -> Result<BTreeMap<SettingTuple, Rational>> {
    let mut map: BTreeMap<SettingTuple, Rational> = BTreeMap::new();
    for (t, c) in terms {
        if !scenario.is_valid_tuple(&t) {
            return Err(Error::InvalidTerm(format!(
                "setting tuple {:?} (0-based) does not fit scenario {}",
                t, scenario
            )));
        }
        *map.entry(t).or_insert_with(Rational::zero) += c;
    }
    map.retain(|_, c| !c.is_zero());
    Ok(map)
}

/// Partial setting assignment: `None` means the party does not appear.
pub type PartialTuple = Vec<Option<usize>>;

/// A general (CH-type) inequality with lower-order terms and a constant:
/// `sum_T alpha_T prod_{p in T} X_{p,T_p} + constant <= bound`.
///
/// Coefficients are stored as given; no normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralInequality {
    scenario: Scenario,
    terms: BTreeMap<PartialTuple, Rational>,
    constant: Rational,
    bound: Rational,
    name: Option<String>,
}

impl GeneralInequality {
    pub fn new(
        scenario: Scenario,
        terms: impl IntoIterator<Item = (PartialTuple, Rational)>,
        constant: Rational,
        bound: Rational,
    ) -> Result<Self> {
        let mut map: BTreeMap<PartialTuple, Rational> = BTreeMap::new();
        for (t, c) in terms {
            if t.len() != scenario.parties() {
                return Err(Error::InvalidTerm(format!(
                    "term {:?} has {} entries for {} parties",
                    t,
                    t.len(),
                    scenario.parties()
                )));
            }
            if t.iter().all(Option::is_none) {
                return Err(Error::InvalidTerm(
                    "the empty term is not allowed; use the constant".into(),
                ));
            }
            for (p, i) in t.iter().enumerate() {
                if let Some(i) = i {
                    if *i >= scenario.settings(p) {
                        return Err(Error::InvalidTerm(format!(
                            "setting {} of party {} out of range",
                            i + 1,
                            p + 1
                        )));
                    }
                }
            }
            *map.entry(t).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(GeneralInequality {
            scenario,
            terms: map,
            constant,
            bound,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn terms(&self) -> &BTreeMap<PartialTuple, Rational> {
        &self.terms
    }

    pub fn constant(&self) -> Rational {
        self.constant
    }

    pub fn bound(&self) -> Rational {
        self.bound
    }

    pub fn evaluate(&self, vertex: &Vertex) -> Result<Rational> {
        if !vertex.belongs_to(&self.scenario) {
            return Err(Error::InvalidArgument(
                "vertex does not belong to the inequality's scenario".into(),
            ));
        }
        let mut total = self.constant;
        for (t, c) in &self.terms {
            let sign: i8 = t
                .iter()
                .enumerate()
                .filter_map(|(p, i)| i.map(|i| vertex.outcome(p, i)))
                .product();
            if sign > 0 {
                total += c;
            } else {
                total -= c;
            }
        }
        Ok(total)
    }

    /// Converts to a full-correlation inequality when every term covers all
    /// parties and the constant is zero.
    pub fn to_full(&self) -> Option<FullCorrelationInequality> {
        if !self.constant.is_zero() {
            return None;
        }
        let terms: Option<Vec<_>> = self
            .terms
            .iter()
            .map(|(t, c)| t.iter().copied().collect::<Option<Vec<_>>>().map(|t| (t, *c)))
            .collect();
        let full = FullCorrelationInequality::new(self.scenario.clone(), terms?, self.bound).ok()?;
        Some(match &self.name {
            Some(n) => full.with_name(n.clone()),
            None => full,
        })
    }
}
