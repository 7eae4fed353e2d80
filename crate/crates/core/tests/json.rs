mod common;

use bellforge::model::json::{self, AnyInequality};
use common::*;
use proptest::prelude::*;

proptest! {
    #[test]
    fn full_round_trip(ineq in inequality(3, 3)) {
        let back = json::parse_full(&json::to_json(&ineq)).unwrap();
        prop_assert_eq!(&back, &ineq);
        prop_assert_eq!(json::to_json(&back), json::to_json(&ineq));
    }

    #[test]
    fn general_round_trip(g in scenario(3, 3).prop_flat_map(general_in)) {
        let text = json::general_to_json(&g);
        prop_assert_eq!(json::parse(&text).unwrap(), AnyInequality::General(g));
    }
}

#[test]
fn malformed_documents_name_the_field() {
    let cases = [
        (r#"{"kind":"full","settings":[2,2],"terms":[{"settings":[3,1],"coeff":"1"}],"bound":"1"}"#, "terms[0]"),
        (r#"{"kind":"full","settings":[2,2],"terms":[{"settings":[1,1],"coeff":"x"}],"bound":"1"}"#, "coeff"),
        (r#"{"kind":"full","settings":[2,2],"terms":[],"bound":"1/0"}"#, "bound"),
    ];
    for (text, field) in cases {
        let err = json::parse(text).unwrap_err().to_string();
        assert!(err.contains(field), "{} -> {}", text, err);
    }
}
