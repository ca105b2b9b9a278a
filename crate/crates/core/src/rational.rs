//! Parsing and rendering of exact rationals.
//!
//! Literals are `"p/q"` or plain integers. JSON carries the same `"p/q"`
//! strings (integers without a denominator); CSV uses the shortest exact
//! form, a terminating decimal when one exists and `p/q` otherwise.

use std::fmt::Display;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Rational, Result};

pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let valid = !text.is_empty()
        && text
            .chars()
            .all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
    if !valid {
        return Err(Error::Parse(format!(
            "{text:?} is not an exact rational (expected p/q or an integer)"
        )));
    }
    Rational::from_str(text).map_err(|e| Error::Parse(format!("{text:?}: {e}")))
}

pub fn to_exact_string(value: &Rational) -> String {
    value.to_string()
}

/// Exact decimal when the reduced denominator is of the form 2^a 5^b,
/// otherwise `p/q`.
pub fn to_csv_string(value: &Rational) -> String {
    let mut den = value.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return value.to_string();
    }
    let digits = twos.max(fives);
    if digits == 0 {
        return value.numer().to_string();
    }
    let scaled = value * Rational::from_integer(BigInt::from(10).pow(digits));
    debug_assert!(scaled.is_integer());
    let scaled = scaled.to_integer();
    let negative = scaled.is_negative();
    let mut body = scaled.abs().to_string();
    let width = digits as usize + 1;
    if body.len() < width {
        body = format!("{}{}", "0".repeat(width - body.len()), body);
    }
    let (int_part, frac_part) = body.split_at(body.len() - digits as usize);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    }
}

pub fn ceil_div(a: usize, b: usize) -> usize {
    assert!(b > 0, "division by zero");
    a.div_ceil(b)
}

pub fn ceil_ratio(a: &Rational) -> BigInt {
    a.ceil().to_integer()
}

pub fn floor_ratio(a: &Rational) -> BigInt {
    a.floor().to_integer()
}

/// Serde adapter storing a scalar as its display string.
pub mod exact_str {
    use super::*;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let text = String::deserialize(d)?;
        T::from_str(&text).map_err(de::Error::custom)
    }
}
