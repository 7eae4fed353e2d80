//! The acceptance criteria as runnable checks, shared by the `acceptance`
//! test target and `bellforge reproduce-paper`.

use std::time::Instant;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::catalog;
use crate::equivalence::{self, GroupElement};
use crate::error::Result;
use crate::lift;
use crate::limits::Limits;
use crate::model::{FullCorrelationInequality, GeneralInequality, PartialTuple, Rational, Scenario};
use crate::polytope;
use crate::quantum::{self, OptimizeOptions};

/// Result of one criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub id: usize,
    pub claim: &'static str,
    pub pass: bool,
    #[serde(skip)]
    pub seconds: f64,
    pub details: Vec<String>,
}

pub const CRITERIA: &[(usize, &str)] = &[
    (1, "four-term bounds"),
    (2, "tightness"),
    (3, "quantum violations"),
    (4, "construction chain"),
    (5, "structure identity"),
    (6, "two-setting iff"),
    (7, "equivalence invariance"),
    (8, "conversion laws"),
];

const WZG: [&str; 6] = ["wzg3", "wzg4", "wzg5", "wzg6", "wzg7", "wzg8"];

/// Collects sub-checks; the criterion passes when all of them do.
struct Log {
    ok: bool,
    details: Vec<String>,
}

impl Log {
    fn new() -> Self {
        Log {
            ok: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        self.ok &= ok;
        self.details.push(format!("{} {}", if ok { "ok  " } else { "FAIL" }, line));
    }
}

fn entry(name: &str) -> FullCorrelationInequality {
    catalog::get(name).expect("catalog entries load").inequality
}

fn fmt(r: &Rational) -> String {
    crate::model::rational::format(r)
}

pub fn run(id: usize, limits: &Limits) -> Result<Outcome> {
    let claim = CRITERIA
        .iter()
        .find(|(i, _)| *i == id)
        .map(|(_, c)| *c)
        .ok_or_else(|| crate::Error::InvalidArgument(format!("no criterion {}", id)))?;
    let start = Instant::now();
    let mut log = Log::new();
    match id {
        1 => bounds(&mut log, limits)?,
        2 => tightness(&mut log, limits)?,
        3 => violations(&mut log, limits)?,
        4 => construction(&mut log, limits)?,
        5 => structure_identity(&mut log)?,
        6 => two_setting_iff(&mut log, limits)?,
        7 => invariance(&mut log, limits)?,
        _ => conversions(&mut log, limits)?,
    }
    let seconds = start.elapsed().as_secs_f64();
    let budget = match id {
        1 => Some(5.0),
        2 => Some(120.0),
        3 => Some(30.0),
        6 => Some(600.0),
        _ => None,
    };
    if let Some(b) = budget {
        log.check(seconds < b, format!("runtime within {} s", b));
    }
    Ok(Outcome {
        id,
        claim,
        pass: log.ok,
        seconds,
        details: log.details,
    })
}

pub fn run_all(limits: &Limits) -> Result<Vec<Outcome>> {
    CRITERIA.iter().map(|(id, _)| run(*id, limits)).collect()
}

fn bounds(log: &mut Log, limits: &Limits) -> Result<()> {
    for name in WZG {
        let ineq = entry(name);
        let lr = polytope::lr_bound(&ineq, limits)?;
        let alg = ineq.algebraic_bound();
        log.check(
            lr == Rational::one() && alg == Rational::from_integer(2),
            format!("{}: lr {} algebraic {}", name, fmt(&lr), fmt(&alg)),
        );
    }
    Ok(())
}

fn facet_line(log: &mut Log, name: &str, ineq: &FullCorrelationInequality, limits: &Limits) -> Result<()> {
    let r = polytope::tightness(ineq, limits)?;
    let want = ineq.scenario().dimension();
    log.check(
        r.is_facet && r.rank == want,
        format!("{}: facet {} rank {}/{}", name, r.is_facet, r.rank, want),
    );
    Ok(())
}

fn tightness(log: &mut Log, limits: &Limits) -> Result<()> {
    for name in WZG.iter().chain(&["i44"]) {
        facet_line(log, name, &entry(name), limits)?;
    }
    Ok(())
}

fn violations(log: &mut Log, limits: &Limits) -> Result<()> {
    let options = OptimizeOptions::default();
    let tol = catalog::QUANTUM_TOLERANCE;
    for name in WZG {
        let q = quantum::maximize_ghz_violation(&entry(name), &options, limits)?;
        log.check(
            (q.violation_factor - 2.0).abs() <= tol && (q.critical_visibility - 0.5).abs() <= tol,
            format!(
                "{}: factor {:.9} v_crit {:.9}",
                name, q.violation_factor, q.critical_visibility
            ),
        );
    }
    let chsh = entry("chsh");
    let q = quantum::maximize_ghz_violation(&chsh, &options, limits)?;
    let top = quantum::max_eigenvalue_bound(&chsh, &q.settings, limits)?;
    let root2 = std::f64::consts::SQRT_2;
    log.check(
        (q.violation_factor - root2).abs() <= tol && (top - root2).abs() <= tol,
        format!("chsh: factor {:.9} eigenvalue {:.9}", q.violation_factor, top),
    );
    Ok(())
}

fn four_term_line(log: &mut Log, name: &str, ineq: &FullCorrelationInequality, limits: &Limits) -> Result<()> {
    let lr = polytope::lr_bound(ineq, limits)?;
    let alg = ineq.algebraic_bound();
    log.check(
        lr == Rational::one() && alg == Rational::from_integer(2),
        format!("{}: lr {} algebraic {}", name, fmt(&lr), fmt(&alg)),
    );
    facet_line(log, name, ineq, limits)
}

fn construction(log: &mut Log, limits: &Limits) -> Result<()> {
    let Some(recipe) = catalog::get("wzg8")?.recipe else {
        log.check(false, "wzg8 has no recipe".into());
        return Ok(());
    };
    let outputs = recipe.run(limits)?;
    let names = ["chsh"].iter().chain(&WZG);
    for (out, name) in outputs.iter().zip(names) {
        let same = equivalence::equivalent(out, &entry(name), limits)?;
        log.check(same, format!("step {}: equivalent {}", name, same));
        four_term_line(log, name, out, limits)?;
    }
    let faces = catalog::i44_faces();
    for (k, b) in faces.iter().enumerate() {
        let r = polytope::tightness(b, limits)?;
        log.check(
            r.is_face && !r.is_facet,
            format!("B_{}: face {} facet {}", k + 1, r.is_face, r.is_facet),
        );
    }
    let lifted = lift::compose_lift(&faces, true, limits)?;
    let same = equivalence::equivalent(&lifted.inequality, &entry("i44"), limits)?;
    log.check(same, format!("i44 from trivial faces: equivalent {}", same));
    let lr = polytope::lr_bound(&lifted.inequality, limits)?;
    log.check(lr == Rational::one(), format!("i44: lr {}", fmt(&lr)));
    facet_line(log, "i44", &lifted.inequality, limits)
}

fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    if rng.random_bool(0.2) {
        return Rational::zero();
    }
    Rational::new(rng.random_range(-9..=9), rng.random_range(1..=6))
}

/// Dense random coefficients with bound 1.
pub fn random_full<R: Rng>(scenario: &Scenario, rng: &mut R) -> FullCorrelationInequality {
    let dense: Vec<Rational> = (0..scenario.dimension()).map(|_| random_rational(rng)).collect();
    FullCorrelationInequality::from_dense(scenario.clone(), &dense).expect("dimension matches")
}

/// Random general inequality: each term keeps each party with probability
/// 2/3, and the constant is nonzero half of the time.
pub fn random_general<R: Rng>(scenario: &Scenario, rng: &mut R) -> GeneralInequality {
    let mut terms: Vec<(PartialTuple, Rational)> = Vec::new();
    for _ in 0..rng.random_range(1..=6) {
        let mut t: PartialTuple = (0..scenario.parties())
            .map(|p| rng.random_bool(2.0 / 3.0).then(|| rng.random_range(0..scenario.settings(p))))
            .collect();
        if t.iter().all(Option::is_none) {
            t[0] = Some(0);
        }
        terms.push((t, random_rational(rng)));
    }
    let constant = if rng.random_bool(0.5) { random_rational(rng) } else { Rational::zero() };
    let bound = Rational::new(rng.random_range(-3..=6), rng.random_range(1..=3));
    GeneralInequality::new(scenario.clone(), terms, constant, bound).expect("valid terms")
}

/// Scenarios with two or three parties and at most three settings each.
pub fn small_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for a in 1..=3 {
        for b in 1..=3 {
            out.push(Scenario::new(vec![a, b]).expect("valid"));
            for c in 1..=3 {
                out.push(Scenario::new(vec![a, b, c]).expect("valid"));
            }
        }
    }
    out
}

fn structure_identity(log: &mut Log) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let scenarios = small_scenarios();
    let mut failures = 0;
    let mut total = 0;
    for s in &scenarios {
        for _ in 0..200 {
            let ineq = random_full(s, &mut rng);
            for p in 0..s.parties() {
                let values = lift::structure_values(&lift::decompose(&ineq, p)?);
                total += 1;
                if !lift::lift_at(&values, p)?.same_form(&ineq) {
                    failures += 1;
                }
            }
        }
    }
    log.check(
        failures == 0,
        format!(
            "{} scenarios x 200 tensors, {} reconstructions, {} mismatches",
            scenarios.len(),
            total,
            failures
        ),
    );
    Ok(())
}

fn two_setting_iff(log: &mut Log, limits: &Limits) -> Result<()> {
    let f22 = polytope::enumerate_facets(&Scenario::uniform(2, 2)?, limits)?;
    let f222 = polytope::enumerate_facets(&Scenario::uniform(3, 2)?, limits)?;
    let mut split_ok = 0;
    for facet in &f222.facets {
        let rep = lift::converse_check(facet, limits)?;
        if rep.reports.iter().all(|r| r.is_facet) {
            split_ok += 1;
        }
    }
    log.check(
        split_ok == f222.facets.len(),
        format!("{}/{} facets of F_222 split into two facets of F_22", split_ok, f222.facets.len()),
    );
    let (mut valid, mut facets) = (0, 0);
    for b1 in &f22.facets {
        for b2 in &f22.facets {
            let lifted = lift::chsh_extend(b1, b2)?;
            if polytope::lr_bound(&lifted, limits)? <= Rational::one() {
                valid += 1;
                if polytope::tightness(&lifted, limits)?.is_facet {
                    facets += 1;
                }
            }
        }
    }
    log.check(
        valid == facets,
        format!("{} of {} valid lifts of F_22 facet pairs are facets", facets, valid),
    );
    let nine = entry("wzg3");
    let mut nine_class = None;
    for (k, class) in f222.orbit_classes.iter().enumerate() {
        if equivalence::equivalent(&f222.facets[class[0]], &nine, limits)? {
            nine_class = Some(k);
        }
    }
    for (label, list, want) in [("F_22", &f22, 16), ("F_222", &f222, 256)] {
        log.check(
            list.facets.len() == want,
            format!("{}: {} facets (expected {})", label, list.facets.len(), want),
        );
        log.check(
            list.orbit_classes.len() == 1,
            format!(
                "{}: {} equivalence classes, {} nontrivial (expected 1 class); sizes {:?}",
                label,
                list.orbit_classes.len(),
                list.nontrivial_classes(),
                list.orbit_classes.iter().map(Vec::len).collect::<Vec<_>>()
            ),
        );
    }
    log.check(
        nine_class.is_some(),
        format!("wzg3 is a facet of F_222 (class {:?})", nine_class.map(|k| k + 1)),
    );
    Ok(())
}

fn invariance(log: &mut Log, limits: &Limits) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for name in catalog::list() {
        let e = catalog::get(name)?;
        if e.provenance != catalog::Provenance::Published {
            continue;
        }
        let ineq = &e.inequality;
        let lr = polytope::lr_bound(ineq, limits)?;
        let alg = ineq.algebraic_bound();
        let report = polytope::tightness(ineq, limits)?;
        let canon = equivalence::canonical_form(ineq, limits)?;
        let idempotent = equivalence::canonical_form(&canon, limits)?.same_form(&canon);
        let mut broken = Vec::new();
        for k in 0..50 {
            let g = GroupElement::random(ineq.scenario(), &mut rng);
            let moved = equivalence::act(&g, ineq)?;
            if polytope::lr_bound(&moved, limits)? != lr {
                broken.push(format!("lr@{}", k));
            }
            if moved.algebraic_bound() != alg {
                broken.push(format!("algebraic@{}", k));
            }
            if polytope::tightness(&moved, limits)? != report {
                broken.push(format!("tightness@{}", k));
            }
            if !equivalence::canonical_form(&moved, limits)?.same_form(&canon) {
                broken.push(format!("canonical@{}", k));
            }
        }
        log.check(
            idempotent && broken.is_empty(),
            format!("{}: idempotent {} violations {:?}", name, idempotent, broken),
        );
    }
    Ok(())
}

fn conversions(log: &mut Log, limits: &Limits) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let scenarios = small_scenarios();
    let mut failures = 0;
    for k in 0..100 {
        let s = &scenarios[k % scenarios.len()];
        let g = random_general(s, &mut rng);
        let fixed = equivalence::homogenization_auxiliaries(&g);
        let back = equivalence::dehomogenize(&equivalence::homogenize(&g)?, &fixed)?;
        if back != g {
            failures += 1;
        }
    }
    log.check(failures == 0, format!("100 round trips, {} mismatches", failures));

    let mut checked = 0;
    let mut invalid = Vec::new();
    for s in scenarios.iter().filter(|s| s.parties() == 2) {
        for _ in 0..10 {
            let raw = random_full(s, &mut rng);
            if raw.is_zero() {
                continue;
            }
            // rescale so the inequality is tight
            let lr = polytope::lr_bound(&raw, limits)?;
            let face = FullCorrelationInequality::new(s.clone(), raw.terms().clone(), lr)?;
            for fixed in fixings(s) {
                let g = equivalence::dehomogenize(&face, &fixed)?;
                checked += 1;
                if polytope::general_lr_bound(&g, limits)? > g.bound() {
                    invalid.push(format!("{} fix {:?}", s, fixed));
                }
            }
        }
    }
    log.check(
        invalid.is_empty(),
        format!("{} dehomogenizations valid by exhaustive check; failures {:?}", checked, invalid),
    );
    Ok(())
}

/// Every choice of at most one fixed setting per party with two or more
/// settings.
fn fixings(s: &Scenario) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for p in 0..s.parties() {
        if s.settings(p) < 2 {
            continue;
        }
        let mut next = Vec::new();
        for f in &out {
            next.push(f.clone());
            for i in 0..s.settings(p) {
                let mut g = f.clone();
                g.push((p, i));
                next.push(g);
            }
        }
        out = next;
    }
    out
}
