//! Exact rational scalars and their `"p/q"` text form.

use num_rational::Ratio;

/// Exact rational used for every coefficient and bound on the polytope path.
pub type Rational = Ratio<i64>;

pub fn parse(text: &str) -> Result<Rational, String> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: i64 = num
        .parse()
        .map_err(|_| format!("`{}` is not a rational number", text))?;
    let den: i64 = den
        .parse()
        .map_err(|_| format!("`{}` is not a rational number", text))?;
    if den == 0 {
        return Err(format!("`{}` has a zero denominator", text));
    }
    Ok(Rational::new(num, den))
}

/// Always `p/q`, with `q = 1` for integers.
pub fn format(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn to_f64(value: &Rational) -> f64 {
    *value.numer() as f64 / *value.denom() as f64
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod as_string {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse("-1/3").unwrap(), Rational::new(-1, 3));
        assert_eq!(parse("2/4").unwrap(), Rational::new(1, 2));
        assert_eq!(parse("7").unwrap(), Rational::from_integer(7));
        assert!(parse("1/0").is_err());
        assert!(parse("a/2").is_err());
    }

    #[test]
    fn format_is_reduced_fraction() {
        assert_eq!(format(&Rational::new(2, -12)), "-1/6");
        assert_eq!(format(&Rational::from_integer(1)), "1/1");
    }
}
