//! Exact rational lengths.
//!
//! Every distance in the crate is a `Length`. Decimal inputs such as `0.6`
//! are read through their shortest decimal spelling, so `0.6` becomes `3/5`
//! and scale comparisons like `diam(σ) <= r` are exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Sub};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LengthError {
    #[error("cannot parse length {0:?}")]
    Parse(String),
    #[error("length {0:?} does not fit the exact rational range")]
    Overflow(String),
    #[error("length must be finite, got {0}")]
    NotFinite(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Length(Ratio<i64>);

impl Length {
    pub const ZERO: Length = Length(Ratio::new_raw(0, 1));
    pub const ONE: Length = Length(Ratio::new_raw(1, 1));

    /// `numer / denom`, reduced. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Length {
        Length(Ratio::new(numer, denom))
    }

    pub fn int(v: i64) -> Length {
        Length(Ratio::from_integer(v))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        *self.0.numer() < 0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn checked_add(&self, other: &Length) -> Option<Length> {
        self.0.checked_add(&other.0).map(Length)
    }

    pub fn checked_sub(&self, other: &Length) -> Option<Length> {
        self.0.checked_sub(&other.0).map(Length)
    }

    /// Exact conversion of a float through its shortest decimal spelling.
    pub fn from_f64(v: f64) -> Result<Length, LengthError> {
        if !v.is_finite() {
            return Err(LengthError::NotFinite(v.to_string()));
        }
        // Display for f64 never uses exponent notation.
        parse_decimal(&format!("{v}"))
    }

    /// Terminating decimal spelling, if the denominator only has factors 2 and 5.
    pub fn to_decimal_string(&self) -> Option<String> {
        let mut d = self.denom();
        let (mut twos, mut fives) = (0u32, 0u32);
        while d % 2 == 0 {
            d /= 2;
            twos += 1;
        }
        while d % 5 == 0 {
            d /= 5;
            fives += 1;
        }
        if d != 1 {
            return None;
        }
        let digits = twos.max(fives);
        let scale = 10i128.checked_pow(digits)?;
        let scaled = (self.numer() as i128).checked_mul(scale)? / self.denom() as i128;
        let neg = scaled < 0;
        let mag = scaled.unsigned_abs().to_string();
        let s = if digits == 0 {
            mag
        } else {
            let digits = digits as usize;
            let padded = format!("{:0>width$}", mag, width = digits + 1);
            let (int, frac) = padded.split_at(padded.len() - digits);
            format!("{int}.{frac}")
        };
        Some(if neg { format!("-{s}") } else { s })
    }

    pub fn max(self, other: Length) -> Length {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Length) -> Length {
        if other < self {
            other
        } else {
            self
        }
    }
}

fn parse_decimal(s: &str) -> Result<Length, LengthError> {
    let t = s.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if (int.is_empty() && frac.is_empty()) || !int.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(LengthError::Parse(s.to_string()));
    }
    let overflow = || LengthError::Overflow(s.to_string());
    let frac = frac.trim_end_matches('0');
    let denom = 10i64.checked_pow(frac.len() as u32).ok_or_else(overflow)?;
    let digits = format!("{int}{frac}");
    let digits = digits.trim_start_matches('0');
    let numer: i64 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| overflow())?
    };
    Ok(Length::new(if neg { -numer } else { numer }, denom))
}

impl FromStr for Length {
    type Err = LengthError;

    /// Accepts `3`, `0.6`, `-1.25` and `p/q`.
    fn from_str(s: &str) -> Result<Length, LengthError> {
        match s.split_once('/') {
            Some((p, q)) => {
                let p: i64 = p.trim().parse().map_err(|_| LengthError::Parse(s.into()))?;
                let q: i64 = q.trim().parse().map_err(|_| LengthError::Parse(s.into()))?;
                if q == 0 {
                    return Err(LengthError::Parse(s.into()));
                }
                Ok(Length::new(p, q))
            }
            None => parse_decimal(s),
        }
    }
}

impl fmt::Display for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_decimal_string() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.numer(), self.denom()),
        }
    }
}

impl fmt::Debug for Length {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add for Length {
    type Output = Length;
    fn add(self, rhs: Length) -> Length {
        self.checked_add(&rhs).expect("length overflow in addition")
    }
}

impl Sub for Length {
    type Output = Length;
    fn sub(self, rhs: Length) -> Length {
        self.checked_sub(&rhs).expect("length overflow in subtraction")
    }
}

impl Mul<i64> for Length {
    type Output = Length;
    fn mul(self, rhs: i64) -> Length {
        Length(
            self.0
                .checked_mul(&Ratio::from_integer(rhs))
                .expect("length overflow in multiplication"),
        )
    }
}

impl Div<i64> for Length {
    type Output = Length;
    fn div(self, rhs: i64) -> Length {
        assert!(rhs != 0, "division of a length by zero");
        let g = self.numer().gcd(&rhs);
        let (n, r) = (self.numer() / g, rhs / g);
        let d = self.denom().checked_mul(r).expect("length overflow in division");
        Length::new(n, d)
    }
}

impl std::iter::Sum for Length {
    fn sum<I: Iterator<Item = Length>>(iter: I) -> Length {
        iter.fold(Length::ZERO, |a, b| a + b)
    }
}

impl From<i64> for Length {
    fn from(v: i64) -> Length {
        Length::int(v)
    }
}

impl Serialize for Length {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.denom() == 1 {
            return s.serialize_i64(self.numer());
        }
        // A JSON float only when reading it back gives the same rational.
        if self.to_decimal_string().is_some() {
            let f = self.to_f64();
            if Length::from_f64(f).ok() == Some(*self) {
                return s.serialize_f64(f);
            }
        }
        s.serialize_str(&format!("{}/{}", self.numer(), self.denom()))
    }
}

struct LengthVisitor;

impl Visitor<'_> for LengthVisitor {
    type Value = Length;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number or a string such as \"3/5\"")
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Length, E> {
        Ok(Length::int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Length, E> {
        i64::try_from(v)
            .map(Length::int)
            .map_err(|_| E::custom(format!("length {v} out of range")))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Length, E> {
        Length::from_f64(v).map_err(E::custom)
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Length, E> {
        v.parse().map_err(E::custom)
    }
}

impl<'de> Deserialize<'de> for Length {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Length, D::Error> {
        d.deserialize_any(LengthVisitor)
    }
}
