//! Exact rational arithmetic helpers.
//!
//! All probabilities and values in this crate are `num_rational::BigRational`,
//! which keeps numbers in lowest terms with a positive denominator. This module
//! adds the `num/den` text syntax used by the model format and the JSON
//! serializations.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

/// Builds `n/d` from machine integers.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses the `num/den` syntax. Decimals are rejected: exactness end to end.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| format!("invalid numerator `{num}`"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| format!("invalid denominator `{den}`"))?;
    if den.is_zero() {
        return Err("denominator is zero".to_string());
    }
    Ok(Rational::new(num, den))
}

/// Renders as `num/den` with the denominator always present ("1/2", "0/1").
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Rounds down to `digits` decimal places (towards negative infinity).
pub fn decimal_floor(r: &Rational, digits: u32) -> String {
    decimal_directed(r, digits, false)
}

/// Rounds up to `digits` decimal places (towards positive infinity).
pub fn decimal_ceil(r: &Rational, digits: u32) -> String {
    decimal_directed(r, digits, true)
}

fn decimal_directed(r: &Rational, digits: u32, round_up: bool) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = r * Rational::from_integer(scale);
    let mut int = scaled.to_integer();
    // to_integer truncates toward zero; fix up to floor/ceil semantics.
    let frac = &scaled - Rational::from_integer(int.clone());
    if round_up && frac.is_positive() {
        int += 1;
    } else if !round_up && frac.is_negative() {
        int -= 1;
    }
    let negative = int.is_negative();
    let digits_str = int.abs().to_string();
    let digits_str = if digits_str.len() <= digits as usize {
        format!("{}{}", "0".repeat(digits as usize + 1 - digits_str.len()), digits_str)
    } else {
        digits_str
    };
    let split = digits_str.len() - digits as usize;
    let (whole, frac) = digits_str.split_at(split);
    let sign = if negative { "-" } else { "" };
    format!("{sign}{whole}.{frac}")
}

/// Serde adapter: rationals as `num/den` strings.
pub mod serde_rational {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Option<Rational>`.
pub mod serde_rational_opt {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["2/3", "-1/4", "7/1", "0/1"] {
            let r = parse_rational(text).unwrap();
            assert_eq!(format_rational(&r), text);
        }
    }

    #[test]
    fn parse_reduces() {
        assert_eq!(format_rational(&parse_rational("4/6").unwrap()), "2/3");
        assert_eq!(format_rational(&parse_rational("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn decimal_rounding_is_directed() {
        let r = rat(1, 3);
        assert_eq!(decimal_floor(&r, 5), "0.33333");
        assert_eq!(decimal_ceil(&r, 5), "0.33334");
        let half = rat(1, 2);
        assert_eq!(decimal_floor(&half, 3), "0.500");
        assert_eq!(decimal_ceil(&half, 3), "0.500");
    }
}
