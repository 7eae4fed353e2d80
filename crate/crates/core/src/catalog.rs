//! Named inequalities with their expected properties and the lifting
//! recipes that regenerate them.

use std::collections::BTreeMap;

use num_traits::One;
use serde::Serialize;

use crate::equivalence;
use crate::error::{Error, Result};
use crate::lift;
use crate::limits::Limits;
use crate::model::{json, rational, FullCorrelationInequality, Rational, Scenario, SettingTuple};
use crate::polytope;
use crate::quantum::{self, OptimizeOptions};

const DATA: &[(&str, &str)] = &[
    ("chsh", include_str!("../data/v1/chsh.json")),
    ("wzg3", include_str!("../data/v1/wzg3.json")),
    ("wzg4", include_str!("../data/v1/wzg4.json")),
    ("wzg5", include_str!("../data/v1/wzg5.json")),
    ("wzg6", include_str!("../data/v1/wzg6.json")),
    ("wzg7", include_str!("../data/v1/wzg7.json")),
    ("wzg8", include_str!("../data/v1/wzg8.json")),
    ("i44", include_str!("../data/v1/i44.json")),
    ("mabk8", include_str!("../data/v1/mabk8.json")),
];

/// Data format version, also the directory name under `data/`.
pub const DATA_VERSION: &str = "v1";

/// Flip pairs (0-based term keys of the previous output) taking the chain
/// from CHSH to each 4-term inequality in turn.
const CHAIN_FLIPS: &[[&[usize]; 2]] = &[
    [&[0, 0], &[1, 1]],
    [&[0, 0, 1], &[0, 1, 0]],
    [&[0, 0, 1, 1], &[1, 0, 0, 0]],
    [&[0, 0, 1, 1, 1], &[0, 1, 0, 1, 0]],
    [&[0, 0, 1, 1, 1, 1], &[0, 1, 0, 1, 0, 1]],
    [&[0, 0, 1, 1, 1, 1, 1], &[0, 1, 0, 1, 0, 1, 1]],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Published,
    /// Standard construction not defined in the source; kept out of the
    /// acceptance claims.
    ExternalStandard,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expected {
    #[serde(with = "rational::as_string")]
    pub lr_bound: Rational,
    #[serde(with = "rational::as_string")]
    pub algebraic_bound: Rational,
    pub violation_factor: Option<f64>,
    pub critical_visibility: Option<f64>,
    pub is_facet: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecipeStep {
    /// Lift the given faces, appending one party.
    Lift(Vec<FullCorrelationInequality>),
    /// Four-term extension of the previous output.
    FourTerm([SettingTuple; 2]),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recipe {
    Steps(Vec<RecipeStep>),
    /// Recursive doubling `M_n = ½ M_{n-1}(a_n + a'_n) + ½ M'_{n-1}(a_n − a'_n)`.
    Mabk(usize),
}

impl Recipe {
    /// Runs the recipe, returning every intermediate output.
    pub fn run(&self, limits: &Limits) -> Result<Vec<FullCorrelationInequality>> {
        match self {
            Recipe::Mabk(n) => Ok(vec![mabk(*n)?]),
            Recipe::Steps(steps) => {
                let mut out: Vec<FullCorrelationInequality> = Vec::new();
                for step in steps {
                    let next = match (step, out.last()) {
                        (RecipeStep::Lift(faces), _) => lift::compose_lift(faces, false, limits)?.inequality,
                        (RecipeStep::FourTerm(pair), Some(prev)) => lift::four_term_extend(prev, pair, limits)?,
                        (RecipeStep::FourTerm(_), None) => {
                            return Err(Error::InvalidArgument(
                                "four-term step without a previous output".into(),
                            ))
                        }
                    };
                    out.push(next);
                }
                Ok(out)
            }
        }
    }

    pub fn describe(&self) -> Vec<String> {
        match self {
            Recipe::Mabk(n) => vec![format!("mabk recursion, {} parties", n)],
            Recipe::Steps(steps) => steps
                .iter()
                .map(|s| match s {
                    RecipeStep::Lift(faces) => format!(
                        "lift {} faces over scenario {}",
                        faces.len(),
                        faces[0].scenario()
                    ),
                    RecipeStep::FourTerm([a, b]) => {
                        let one = |t: &SettingTuple| t.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join("");
                        format!("four-term extend, flip {} and {}", one(a), one(b))
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub inequality: FullCorrelationInequality,
    pub expected: Expected,
    pub recipe: Option<Recipe>,
    pub provenance: Provenance,
}

pub fn list() -> Vec<&'static str> {
    DATA.iter().map(|(n, _)| *n).collect()
}

/// The stored JSON document of an entry.
pub fn document(name: &str) -> Result<&'static str> {
    DATA.iter()
        .find(|(n, _)| *n == name)
        .map(|(_, d)| *d)
        .ok_or_else(|| Error::UnknownEntry(name.to_owned()))
}

fn single_party_face(settings: usize, coefficients: &[(usize, Rational)]) -> FullCorrelationInequality {
    FullCorrelationInequality::new(
        Scenario::new(vec![settings]).expect("valid"),
        coefficients.iter().map(|&(i, c)| (vec![i], c)),
        Rational::one(),
    )
    .expect("valid face")
}

/// The facets `a_1` and `a_2` of the single-party polytope.
pub fn seed_faces() -> Vec<FullCorrelationInequality> {
    vec![
        single_party_face(2, &[(0, Rational::one())]),
        single_party_face(2, &[(1, Rational::one())]),
    ]
}

/// Four trivial faces of the single-party polytope with four settings.
pub fn i44_faces() -> Vec<FullCorrelationInequality> {
    let t = |n| Rational::new(n, 3);
    vec![
        single_party_face(4, &[(1, t(2)), (2, t(1))]),
        single_party_face(4, &[(0, t(-1)), (1, t(1)), (3, t(-1))]),
        single_party_face(4, &[(0, t(-1)), (1, t(1)), (3, t(1))]),
        single_party_face(4, &[(1, t(1)), (2, t(2))]),
    ]
}

fn chain(parties: usize) -> Recipe {
    let mut steps = vec![RecipeStep::Lift(seed_faces())];
    for pair in &CHAIN_FLIPS[..parties - 2] {
        steps.push(RecipeStep::FourTerm([pair[0].to_vec(), pair[1].to_vec()]));
    }
    Recipe::Steps(steps)
}

/// The Mermin–Ardehali–Belinskii–Klyshko expression on `n` parties with two
/// settings each.
pub fn mabk(n: usize) -> Result<FullCorrelationInequality> {
    if n == 0 {
        return Err(Error::InvalidArgument("mabk needs at least one party".into()));
    }
    let half = Rational::new(1, 2);
    let mut m: BTreeMap<SettingTuple, Rational> = BTreeMap::from([(vec![0], Rational::one())]);
    let mut mp: BTreeMap<SettingTuple, Rational> = BTreeMap::from([(vec![1], Rational::one())]);
    for _ in 1..n {
        let mut next = BTreeMap::new();
        let mut next_p = BTreeMap::new();
        let add = |map: &mut BTreeMap<SettingTuple, Rational>, t: &SettingTuple, k: usize, c: Rational| {
            let mut key = t.clone();
            key.push(k);
            *map.entry(key).or_default() += c;
        };
        for (t, &c) in &m {
            add(&mut next, t, 0, c * half);
            add(&mut next, t, 1, c * half);
            add(&mut next_p, t, 1, c * half);
            add(&mut next_p, t, 0, -c * half);
        }
        for (t, &c) in &mp {
            add(&mut next, t, 0, c * half);
            add(&mut next, t, 1, -c * half);
            add(&mut next_p, t, 1, c * half);
            add(&mut next_p, t, 0, c * half);
        }
        m = next;
        mp = next_p;
    }
    FullCorrelationInequality::new(Scenario::uniform(n, 2)?, m, Rational::one())
}

pub fn get(name: &str) -> Result<CatalogEntry> {
    let inequality = json::parse_full(document(name)?)?;
    let one = Rational::one();
    let two = Rational::from_integer(2);
    let wzg = Expected {
        lr_bound: one,
        algebraic_bound: two,
        violation_factor: Some(2.0),
        critical_visibility: Some(0.5),
        is_facet: true,
    };
    let (expected, recipe, provenance) = match name {
        "chsh" => (
            Expected {
                violation_factor: Some(std::f64::consts::SQRT_2),
                critical_visibility: Some(std::f64::consts::FRAC_1_SQRT_2),
                ..wzg
            },
            Some(chain(2)),
            Provenance::Published,
        ),
        "i44" => (
            Expected {
                lr_bound: one,
                algebraic_bound: Rational::new(7, 3),
                violation_factor: None,
                critical_visibility: None,
                is_facet: true,
            },
            Some(Recipe::Steps(vec![RecipeStep::Lift(i44_faces())])),
            Provenance::Published,
        ),
        "mabk8" => {
            let factor = 2f64.powf(3.5);
            (
                Expected {
                    lr_bound: one,
                    algebraic_bound: Rational::from_integer(16),
                    violation_factor: Some(factor),
                    critical_visibility: Some(1.0 / factor),
                    is_facet: true,
                },
                Some(Recipe::Mabk(8)),
                Provenance::ExternalStandard,
            )
        }
        _ => {
            let n: usize = name[3..].parse().expect("wzg entries end in a party count");
            (wzg, Some(chain(n)), Provenance::Published)
        }
    };
    Ok(CatalogEntry {
        name: name.to_owned(),
        inequality,
        expected,
        recipe,
        provenance,
    })
}

/// One checked property of a catalog entry.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub property: String,
    pub expected: String,
    pub found: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<Check>,
    pub pass: bool,
}

/// Tolerance for the floating-point expectations.
pub const QUANTUM_TOLERANCE: f64 = 1e-6;

/// Re-derives every expected property of an entry with the engines.
pub fn check(entry: &CatalogEntry, options: &OptimizeOptions, limits: &Limits) -> Result<CheckReport> {
    let ineq = &entry.inequality;
    let e = &entry.expected;
    let mut checks = Vec::new();
    let mut exact = |property: &str, want: Rational, got: Rational| {
        checks.push(Check {
            property: property.into(),
            expected: rational::format(&want),
            found: rational::format(&got),
            pass: want == got,
        })
    };
    exact("lr_bound", e.lr_bound, polytope::lr_bound(ineq, limits)?);
    exact("algebraic_bound", e.algebraic_bound, ineq.algebraic_bound());
    let report = polytope::tightness(ineq, limits)?;
    checks.push(Check {
        property: "is_facet".into(),
        expected: e.is_facet.to_string(),
        found: format!("{} (rank {}/{})", report.is_facet, report.rank, report.dimension),
        pass: report.is_facet == e.is_facet,
    });
    if e.violation_factor.is_some() || e.critical_visibility.is_some() {
        let q = quantum::maximize_ghz_violation(ineq, options, limits)?;
        for (property, want, got) in [
            ("violation_factor", e.violation_factor, q.violation_factor),
            ("critical_visibility", e.critical_visibility, q.critical_visibility),
        ] {
            if let Some(want) = want {
                checks.push(Check {
                    property: property.into(),
                    expected: format!("{:.12}", want),
                    found: format!("{:.12}", got),
                    pass: (want - got).abs() <= QUANTUM_TOLERANCE,
                });
            }
        }
    }
    if let Some(recipe) = &entry.recipe {
        let out = recipe.run(limits)?;
        let last = out.last().expect("recipes produce output");
        let same = equivalence::equivalent(last, ineq, limits)?;
        checks.push(Check {
            property: "recipe".into(),
            expected: "equivalent to stored".into(),
            found: if same { "equivalent" } else { "not equivalent" }.into(),
            pass: same,
        });
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(CheckReport {
        name: entry.name.clone(),
        checks,
        pass,
    })
}
