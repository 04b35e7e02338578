//! Exact rational helpers shared by every module.
//!
//! Probabilities, bounds and costs are [`Rational`] values (reduced, positive
//! denominator). Floating point only appears at the edges: readable decimal
//! approximations in JSON output and inside the entropy solver.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Builds `num/den` from machine integers. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

pub fn from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"-7"` or a decimal literal such as `"0.125"`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(text.to_string());
    let s = text.trim();
    if s.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| err())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| err())?;
        if den.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        if frac_part.is_empty() && int_digits.is_empty() {
            return Err(err());
        }
        if !frac_part.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
        {
            return Err(err());
        }
        let digits = format!("{int_digits}{frac_part}");
        let magnitude =
            BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10u32), frac_part.len());
        let value = Rational::new(magnitude, scale);
        return Ok(if negative { -value } else { value });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| err())
}

/// Canonical text form: `"p/q"`, or `"p"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division when either side overflows f64.
        let shift = r.numer().bits().max(r.denom().bits()).saturating_sub(1000);
        let num = r.numer() >> shift;
        let den = r.denom() >> shift;
        num.to_f64().unwrap_or(f64::NAN) / den.to_f64().unwrap_or(f64::NAN)
    })
}

/// Exact conversion of a finite f64 to a rational.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// `floor(r)` as a big integer.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// `ceil(r)` as a big integer.
pub fn ceil(r: &Rational) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

pub fn is_probability(r: &Rational) -> bool {
    !r.is_negative() && *r <= Rational::one()
}

/// Wire form of an exact rational: `{"num": "129", "den": "50"}` plus a
/// decimal approximation that readers may ignore.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactJson {
    pub num: String,
    pub den: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approx: Option<f64>,
}

impl From<&Rational> for ExactJson {
    fn from(r: &Rational) -> Self {
        ExactJson {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: Some(to_f64(r)),
        }
    }
}

impl TryFrom<&ExactJson> for Rational {
    type Error = ParseRationalError;

    fn try_from(value: &ExactJson) -> Result<Self, Self::Error> {
        parse_rational(&format!("{}/{}", value.num, value.den))
    }
}

/// Serde adapter for `{"num","den"}` objects.
pub mod exact {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        ExactJson::from(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let json = ExactJson::deserialize(d)?;
        Rational::try_from(&json).map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let items: Vec<ExactJson> = v.iter().map(ExactJson::from).collect();
            items.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let items = Vec::<ExactJson>::deserialize(d)?;
            items
                .iter()
                .map(|j| Rational::try_from(j).map_err(serde::de::Error::custom))
                .collect()
        }
    }

    pub mod matrix {
        use super::*;

        pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
            let rows: Vec<Vec<ExactJson>> = m
                .iter()
                .map(|row| row.iter().map(ExactJson::from).collect())
                .collect();
            rows.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> Result<Vec<Vec<Rational>>, D::Error> {
            let rows = Vec::<Vec<ExactJson>>::deserialize(d)?;
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|j| Rational::try_from(j).map_err(serde::de::Error::custom))
                        .collect()
                })
                .collect()
        }
    }
}

/// Serde adapter for the compact `"p/q"` string form used in instance files.
pub mod text {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = RawNumber::deserialize(d)?;
        raw.into_rational().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let items: Vec<String> = v.iter().map(format_rational).collect();
            items.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let items = Vec::<RawNumber>::deserialize(d)?;
            items
                .into_iter()
                .map(|raw| raw.into_rational().map_err(serde::de::Error::custom))
                .collect()
        }
    }

    /// Instance files may spell a rational as a string or a plain JSON number.
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum RawNumber {
        Text(String),
        Int(i64),
        Float(f64),
    }

    impl RawNumber {
        fn into_rational(self) -> Result<Rational, ParseRationalError> {
            match self {
                RawNumber::Text(s) => parse_rational(&s),
                RawNumber::Int(i) => Ok(Rational::from_integer(BigInt::from(i))),
                // Decimal spelling, so 0.1 means 1/10 rather than the binary float.
                RawNumber::Float(f) => parse_rational(&format!("{f}")),
            }
        }
    }
}

/// Serde adapter writing a matrix of big counts as decimal strings.
pub mod count_matrix {
    use super::*;
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(m: &[Vec<BigUint>], s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = m
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<BigUint>>, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.iter()
                    .map(|t| BigUint::from_str(t).map_err(serde::de::Error::custom))
                    .collect()
            })
            .collect()
    }
}

/// Displays a rational as `p/q` (or `p`).
pub struct Display<'a>(pub &'a Rational);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(self.0))
    }
}

/// Natural logarithm of a big integer that may exceed the f64 range.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map(f64::ln).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}
