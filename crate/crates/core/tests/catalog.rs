use bellforge::catalog::{self, Provenance};
use bellforge::model::json;
use bellforge::quantum::OptimizeOptions;
use bellforge::{FullCorrelationInequality, Limits, Rational, Scenario};
use num_traits::One;

/// Parses "+ a1b1c1 - a2b2c1 ..." with a common coefficient.
fn transcribe(parties: usize, settings: usize, scale: Rational, text: &str) -> FullCorrelationInequality {
    let mut terms = Vec::new();
    let mut sign = 1;
    for token in text.split_whitespace() {
        match token {
            "+" => sign = 1,
            "-" => sign = -1,
            word => {
                let t: Vec<usize> = word
                    .as_bytes()
                    .chunks(2)
                    .map(|c| (c[1] - b'1') as usize)
                    .collect();
                assert_eq!(t.len(), parties, "{}", word);
                terms.push((t, scale * Rational::from_integer(sign)));
            }
        }
    }
    FullCorrelationInequality::new(Scenario::uniform(parties, settings).unwrap(), terms, Rational::one()).unwrap()
}

#[test]
fn stored_inequalities_match_published_terms() {
    let half = Rational::new(1, 2);
    let listed = [
        ("wzg3", 3, "+ a1b1c1 - a1b2c2 - a2b1c2 - a2b2c1"),
        ("wzg4", 4, "+ a1b1c1d1 + a1b2c2d2 + a2b1c2d1 - a2b2c1d2"),
        ("wzg5", 5, "+ a1b1c1d1e1 + a2b2c2d1e2 - a2b2c1d2e1 + a1b1c2d2e2"),
        ("wzg6", 6, "+ a1b1c1d1e1f1 - a2b2c1d2e1f1 + a2b2c2d1e2f2 + a1b1c2d2e2f2"),
        ("wzg7", 7, "+ a1b1c1d1e1f1g1 - a2b2c1d2e1f1g1 + a2b2c2d1e2f2g2 + a1b1c2d2e2f2g2"),
        ("wzg8", 8, "+ a1b1c1d1e1f1g1h1 - a2b2c1d2e1f1g1h1 + a2b2c2d1e2f2g2h2 + a1b1c2d2e2f2g2h2"),
    ];
    for (name, n, text) in listed {
        let want = transcribe(n, 2, half, text);
        assert!(catalog::get(name).unwrap().inequality.same_form(&want), "{}", name);
    }
    let sixth = Rational::new(1, 6);
    let i44 = transcribe(
        2,
        4,
        sixth,
        "- a1b1 - a1b1 + a2b1 + a3b1 + a1b2 + a1b3 + a2b2 + a2b3 + a3b2 + a3b3 + a4b2 - a4b3 + a2b4 - a3b4",
    );
    assert!(catalog::get("i44").unwrap().inequality.same_form(&i44));
}

#[test]
fn every_document_round_trips() {
    for name in catalog::list() {
        let text = catalog::document(name).unwrap();
        let parsed = json::parse_full(text).unwrap();
        assert_eq!(json::to_json(&parsed) + "\n", text, "{}", name);
    }
}

#[test]
fn published_entries_pass_their_checks() {
    let limits = Limits::default();
    for name in catalog::list() {
        let entry = catalog::get(name).unwrap();
        if entry.provenance != Provenance::Published {
            continue;
        }
        let report = catalog::check(&entry, &OptimizeOptions::default(), &limits).unwrap();
        assert!(report.pass, "{:#?}", report);
    }
}

#[test]
fn unknown_entry() {
    assert!(catalog::get("nope").is_err());
}
