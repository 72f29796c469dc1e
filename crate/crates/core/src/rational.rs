//! Canonical `p/q` rational formatting, parsing, and serde adapters.
//!
//! Every rational that crosses a wire format is rendered as `p/q` in lowest
//! terms with the sign on the numerator, including integers (`3/1`). Floats
//! never appear.

use num::bigint::{BigInt, Sign};
use num::{BigRational, BigUint, One, Zero};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Renders `r` as `p/q` in lowest terms. `BigRational` keeps itself reduced
/// with a positive denominator, so this is a plain read-out.
pub fn format_ratio(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `p/q` or a bare integer `p`; whitespace around either part is
/// rejected. The result is reduced.
pub fn parse_ratio(s: &str) -> Result<BigRational, RationalParseError> {
    if s.is_empty() {
        return Err(RationalParseError::Empty);
    }
    let (num_part, den_part) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer =
        BigInt::from_str(num_part).map_err(|_| RationalParseError::Invalid(s.to_owned()))?;
    let denom = match den_part {
        Some(d) => BigInt::from_str(d).map_err(|_| RationalParseError::Invalid(s.to_owned()))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(RationalParseError::ZeroDenominator(s.to_owned()));
    }
    Ok(BigRational::new(numer, denom))
}

/// Builds `n/d` from machine integers.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Builds the rational value of an unsigned big integer.
pub fn ratio_from_nat(n: &BigUint) -> BigRational {
    BigRational::from(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Serde adapter: `BigRational` as a canonical `p/q` string.
pub mod serde_ratio {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_ratio(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigRational, D::Error> {
        let raw = String::deserialize(de)?;
        parse_ratio(&raw).map_err(D::Error::custom)
    }
}

/// Serde adapter: `Vec<BigRational>` as canonical `p/q` strings.
pub mod serde_ratio_vec {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(rs: &[BigRational], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(rs.iter().map(format_ratio))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<BigRational>, D::Error> {
        let raw = Vec::<String>::deserialize(de)?;
        raw.iter()
            .map(|s| parse_ratio(s).map_err(D::Error::custom))
            .collect()
    }
}

/// Serde adapter: `BigUint` as a decimal string (tower values overflow u64).
pub mod serde_nat {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigUint, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<BigUint, D::Error> {
        let raw = String::deserialize(de)?;
        BigUint::from_str(&raw).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_reduced_with_integer_denominator() {
        assert_eq!(format_ratio(&ratio(6, 4)), "3/2");
        assert_eq!(format_ratio(&ratio(5, 1)), "5/1");
        assert_eq!(format_ratio(&ratio(-6, 4)), "-3/2");
        assert_eq!(format_ratio(&ratio(6, -4)), "-3/2");
        assert_eq!(format_ratio(&ratio(0, 7)), "0/1");
    }

    #[test]
    fn parses_both_literal_shapes() {
        assert_eq!(parse_ratio("3/2").expect("p/q"), ratio(3, 2));
        assert_eq!(parse_ratio("-8/6").expect("reduces"), ratio(-4, 3));
        assert_eq!(parse_ratio("17").expect("bare integer"), ratio(17, 1));
        assert_eq!(parse_ratio("0/9").expect("zero"), ratio(0, 1));
    }

    #[test]
    fn rejects_malformed_literals() {
        assert_eq!(parse_ratio(""), Err(RationalParseError::Empty));
        assert!(matches!(
            parse_ratio("1/0"),
            Err(RationalParseError::ZeroDenominator(_))
        ));
        assert!(matches!(
            parse_ratio("1.5"),
            Err(RationalParseError::Invalid(_))
        ));
        assert!(matches!(
            parse_ratio("1 / 2"),
            Err(RationalParseError::Invalid(_))
        ));
        assert!(matches!(
            parse_ratio("1/2/3"),
            Err(RationalParseError::Invalid(_))
        ));
    }

    #[test]
    fn round_trips_through_format() {
        for (n, d) in [(1i64, 3i64), (-7, 2), (0, 1), (22, 7), (100, 100)] {
            let r = ratio(n, d);
            assert_eq!(parse_ratio(&format_ratio(&r)).expect("round trip"), r);
        }
    }
}
