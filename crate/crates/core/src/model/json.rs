//! JSON interchange for inequalities.
//!
//! ```json
//! {"kind": "full", "settings": [2, 2],
//!  "terms": [{"settings": [1, 1], "coeff": "1/2"}, ...],
//!  "bound": "1/1", "name": "chsh"}
//! ```
//!
//! Setting indices are 1-based. In `general` documents a 0 marks a party
//! absent from the term, and an optional `constant` is allowed. Full
//! documents may carry `original_bound` when the inequality was normalized
//! from a bound other than 1.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::inequality::{FullCorrelationInequality, GeneralInequality};
use super::rational::{self, Rational};
use super::scenario::Scenario;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermDocument {
    pub settings: Vec<usize>,
    pub coeff: String,
}

/// Wire form of either inequality kind.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InequalityDocument {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub settings: Vec<usize>,
    pub terms: Vec<TermDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constant: Option<String>,
    pub bound: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_bound: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub canonical: Option<bool>,
}

/// A parsed document of either kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyInequality {
    Full(FullCorrelationInequality),
    General(GeneralInequality),
}

impl InequalityDocument {
    pub fn from_full(ineq: &FullCorrelationInequality) -> Self {
        InequalityDocument {
            kind: "full".into(),
            name: ineq.name().map(str::to_owned),
            settings: ineq.scenario().settings_per_party().to_vec(),
            terms: ineq
                .terms()
                .iter()
                .map(|(t, c)| TermDocument {
                    settings: t.iter().map(|i| i + 1).collect(),
                    coeff: rational::format(c),
                })
                .collect(),
            constant: None,
            bound: rational::format(&ineq.bound()),
            original_bound: (!ineq.scale().is_one())
                .then(|| rational::format(&ineq.original_bound())),
            canonical: None,
        }
    }

    pub fn from_general(ineq: &GeneralInequality) -> Self {
        InequalityDocument {
            kind: "general".into(),
            name: ineq.name().map(str::to_owned),
            settings: ineq.scenario().settings_per_party().to_vec(),
            terms: ineq
                .terms()
                .iter()
                .map(|(t, c)| TermDocument {
                    settings: t.iter().map(|i| i.map_or(0, |i| i + 1)).collect(),
                    coeff: rational::format(c),
                })
                .collect(),
            constant: Some(rational::format(&ineq.constant())),
            bound: rational::format(&ineq.bound()),
            original_bound: None,
            canonical: None,
        }
    }

    pub fn canonical(mut self) -> Self {
        self.canonical = Some(true);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn into_inequality(self) -> Result<AnyInequality> {
        let scenario = Scenario::new(self.settings.clone())
            .map_err(|e| Error::parse("settings", e.to_string()))?;
        let bound = field_rational("bound", &self.bound)?;
        match self.kind.as_str() {
            "full" => {
                if self.constant.is_some() {
                    return Err(Error::parse("constant", "not allowed for kind `full`"));
                }
                let mut terms = std::collections::BTreeMap::new();
                for (k, term) in self.terms.iter().enumerate() {
                    let field = format!("terms[{}]", k);
                    let tuple = full_tuple(&scenario, &term.settings, &field)?;
                    let coeff = field_rational(&format!("{}.coeff", field), &term.coeff)?;
                    if coeff.is_zero() {
                        continue;
                    }
                    if terms.insert(tuple, coeff).is_some() {
                        return Err(Error::parse(
                            format!("{}.settings", field),
                            "duplicate setting tuple",
                        ));
                    }
                }
                let ineq = match &self.original_bound {
                    Some(ob) => {
                        let original = field_rational("original_bound", ob)?;
                        if bound.is_zero() || original.is_zero() {
                            return Err(Error::parse(
                                "original_bound",
                                "only meaningful with a nonzero bound",
                            ));
                        }
                        let scale = original / bound;
                        if bound.abs() != Rational::one() || scale <= Rational::zero() {
                            return Err(Error::parse(
                                "original_bound",
                                "inconsistent with a normalized bound",
                            ));
                        }
                        FullCorrelationInequality::from_normalized_parts(
                            scenario, terms, bound, scale,
                        )
                    }
                    None => FullCorrelationInequality::normalized(scenario, terms, bound),
                };
                Ok(AnyInequality::Full(match self.name {
                    Some(n) => ineq.with_name(n),
                    None => ineq,
                }))
            }
            "general" => {
                let constant = match &self.constant {
                    Some(c) => field_rational("constant", c)?,
                    None => Rational::zero(),
                };
                let mut terms = Vec::with_capacity(self.terms.len());
                for (k, term) in self.terms.iter().enumerate() {
                    let field = format!("terms[{}]", k);
                    if term.settings.len() != scenario.parties() {
                        return Err(Error::parse(
                            format!("{}.settings", field),
                            format!("expected {} entries", scenario.parties()),
                        ));
                    }
                    let mut tuple = Vec::with_capacity(term.settings.len());
                    for (p, &i) in term.settings.iter().enumerate() {
                        if i > scenario.settings(p) {
                            return Err(Error::parse(
                                format!("{}.settings[{}]", field, p),
                                format!("setting {} exceeds {}", i, scenario.settings(p)),
                            ));
                        }
                        tuple.push(i.checked_sub(1));
                    }
                    if tuple.iter().all(Option::is_none) {
                        return Err(Error::parse(
                            format!("{}.settings", field),
                            "empty term; use `constant`",
                        ));
                    }
                    terms.push((tuple, field_rational(&format!("{}.coeff", field), &term.coeff)?));
                }
                let g = GeneralInequality::new(scenario, terms, constant, bound)?;
                Ok(AnyInequality::General(match self.name {
                    Some(n) => g.with_name(n),
                    None => g,
                }))
            }
            other => Err(Error::parse(
                "kind",
                format!("expected `full` or `general`, got `{}`", other),
            )),
        }
    }
}

fn field_rational(field: &str, text: &str) -> Result<Rational> {
    rational::parse(text).map_err(|m| Error::parse(field, m))
}

fn full_tuple(scenario: &Scenario, settings: &[usize], field: &str) -> Result<Vec<usize>> {
    if settings.len() != scenario.parties() {
        return Err(Error::parse(
            format!("{}.settings", field),
            format!("expected {} entries", scenario.parties()),
        ));
    }
    settings
        .iter()
        .enumerate()
        .map(|(p, &i)| {
            if i == 0 || i > scenario.settings(p) {
                Err(Error::parse(
                    format!("{}.settings[{}]", field, p),
                    format!("setting {} outside 1..={}", i, scenario.settings(p)),
                ))
            } else {
                Ok(i - 1)
            }
        })
        .collect()
}

pub fn parse_document(text: &str) -> Result<InequalityDocument> {
    serde_json::from_str(text).map_err(|e| Error::parse("document", e.to_string()))
}

pub fn parse(text: &str) -> Result<AnyInequality> {
    parse_document(text)?.into_inequality()
}

pub fn parse_full(text: &str) -> Result<FullCorrelationInequality> {
    match parse(text)? {
        AnyInequality::Full(f) => Ok(f),
        AnyInequality::General(_) => Err(Error::parse("kind", "expected a `full` inequality")),
    }
}

pub fn parse_general(text: &str) -> Result<GeneralInequality> {
    match parse(text)? {
        AnyInequality::General(g) => Ok(g),
        AnyInequality::Full(f) => Ok(f.to_general()),
    }
}

pub fn to_json(ineq: &FullCorrelationInequality) -> String {
    InequalityDocument::from_full(ineq).to_json()
}

pub fn general_to_json(ineq: &GeneralInequality) -> String {
    InequalityDocument::from_general(ineq).to_json()
}

pub fn to_value(ineq: &FullCorrelationInequality) -> serde_json::Value {
    serde_json::to_value(InequalityDocument::from_full(ineq)).expect("documents always serialize")
}

/// Serde adapter embedding a full inequality as its document.
pub mod as_document {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{AnyInequality, InequalityDocument};
    use crate::model::FullCorrelationInequality;

    pub fn serialize<S: Serializer>(v: &FullCorrelationInequality, s: S) -> Result<S::Ok, S::Error> {
        InequalityDocument::from_full(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<FullCorrelationInequality, D::Error> {
        match InequalityDocument::deserialize(d)?
            .into_inequality()
            .map_err(serde::de::Error::custom)?
        {
            AnyInequality::Full(f) => Ok(f),
            AnyInequality::General(_) => Err(serde::de::Error::custom("expected a full inequality")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHSH: &str = r#"{"kind":"full","settings":[2,2],"terms":[
        {"settings":[1,1],"coeff":"1/2"},{"settings":[1,2],"coeff":"1/2"},
        {"settings":[2,1],"coeff":"1/2"},{"settings":[2,2],"coeff":"-1/2"}],
        "bound":"1","name":"chsh"}"#;

    #[test]
    fn chsh_roundtrip() {
        let ineq = parse_full(CHSH).unwrap();
        let text = to_json(&ineq);
        assert_eq!(parse_full(&text).unwrap(), ineq);
        assert_eq!(to_json(&parse_full(&text).unwrap()), text);
    }

    #[test]
    fn zero_denominator_names_field() {
        let bad = CHSH.replace("\"-1/2\"", "\"1/0\"");
        match parse(&bad) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "terms[3].coeff"),
            other => panic!("unexpected {:?}", other),
        }
    }

    #[test]
    fn bad_setting_index() {
        let bad = CHSH.replace("[2,2],\"coeff\"", "[2,3],\"coeff\"");
        match parse(&bad) {
            Err(Error::Parse { field, .. }) => assert_eq!(field, "terms[3].settings[1]"),
            other => panic!("unexpected {:?}", other),
        }
        assert!(parse("{not json").is_err());
        assert!(parse(&CHSH.replace("\"full\"", "\"mixed\"")).is_err());
    }

    #[test]
    fn normalization_survives_roundtrip() {
        let doubled = r#"{"kind":"full","settings":[1],"terms":[{"settings":[1],"coeff":"3"}],"bound":"2"}"#;
        let ineq = parse_full(doubled).unwrap();
        assert_eq!(ineq.coefficient(&[0]), Rational::new(3, 2));
        assert_eq!(ineq.original_bound(), Rational::from_integer(2));
        assert_eq!(parse_full(&to_json(&ineq)).unwrap(), ineq);
    }

    #[test]
    fn general_document() {
        let text = r#"{"kind":"general","settings":[2,1],"terms":[
            {"settings":[1,1],"coeff":"1/2"},{"settings":[1,0],"coeff":"1/2"},
            {"settings":[2,1],"coeff":"1/2"},{"settings":[2,0],"coeff":"-1/2"}],
            "constant":"0","bound":"1"}"#;
        let g = parse_general(text).unwrap();
        assert_eq!(g.terms().len(), 4);
        assert_eq!(parse_general(&general_to_json(&g)).unwrap(), g);
        let empty = text.replace("[1,0]", "[0,0]");
        assert!(parse(&empty).is_err());
    }
}
