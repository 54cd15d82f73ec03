//! Arithmetic abstraction shared by every module.
//!
//! All evaluation and LP code is generic over [`Scalar`], implemented for
//! `f64` (tolerance based) and [`Rational`] (exact, every tolerance is zero).

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    /// True when arithmetic is exact and tolerances collapse to zero.
    const EXACT: bool;
    const MODE: &'static str;

    fn from_rational(r: &Rational) -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_rational(&self) -> Rational;

    fn from_i64(x: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(x)))
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// A tolerance of magnitude `t`, or exactly zero in exact mode.
    fn tol(t: f64) -> Self {
        if Self::EXACT {
            Self::zero()
        } else {
            Self::from_f64(t)
        }
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// `|a - b| <= abs + rel * max(|a|, |b|)`.
    fn approx_eq(&self, other: &Self, abs: f64, rel: f64) -> bool {
        if Self::EXACT {
            return self == other;
        }
        let d = (self.clone() - other.clone()).abs();
        let scale = Self::max_of(self.abs(), other.abs());
        d <= Self::from_f64(abs) + Self::from_f64(rel) * scale
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn from_rational(r: &Rational) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn to_rational(&self) -> Rational {
        Rational::from_float(*self).unwrap_or_else(Rational::zero)
    }

    fn from_i64(x: i64) -> Self {
        x as f64
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(x: f64) -> Self {
        Rational::from_float(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }
}

/// Absolute feasibility and relative value tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub feasibility: f64,
    pub relative: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feasibility: 1e-9,
            relative: 1e-6,
        }
    }
}

/// A number as it appears in input files: decimal or `"p/q"`, kept exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Number(pub Rational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse number `{0}`")]
pub struct ParseNumberError(pub String);

impl Number {
    pub fn get<S: Scalar>(&self) -> S {
        S::from_rational(&self.0)
    }

    pub fn from_scalar<S: Scalar>(s: &S) -> Self {
        Number(s.to_rational())
    }
}

impl FromStr for Number {
    type Err = ParseNumberError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s)
            .map(Number)
            .ok_or_else(|| ParseNumberError(s.to_string()))
    }
}

impl Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Parses `"p/q"`, integers, decimals and scientific notation exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = parse_rational(p)?;
        let q = parse_rational(q)?;
        if q.is_zero() {
            return None;
        }
        return Some(p / q);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            if let Some(i) = self.0.numer().to_i64() {
                return serializer.serialize_i64(i);
            }
        }
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(serde_json::Number),
            Str(String),
        }
        let text = match Raw::deserialize(deserializer)? {
            Raw::Num(n) => n.to_string(),
            Raw::Str(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

pub fn identity<S: Scalar>(n: usize) -> Vec<Vec<S>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect()
}

pub fn convert_matrix<A: Scalar, B: Scalar>(m: &[Vec<A>]) -> Vec<Vec<B>> {
    m.iter()
        .map(|row| row.iter().map(|x| B::from_rational(&x.to_rational())).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parses_rational_forms() {
        assert_eq!(parse_rational("3/4"), Some(q(3, 4)));
        assert_eq!(parse_rational("-2"), Some(q(-2, 1)));
        assert_eq!(parse_rational("0.1"), Some(q(1, 10)));
        assert_eq!(parse_rational("1.5e2"), Some(q(150, 1)));
        assert_eq!(parse_rational("25e-3"), Some(q(1, 40)));
        assert_eq!(parse_rational(".5"), Some(q(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("abc"), None);
        assert_eq!(parse_rational(""), None);
    }

    #[test]
    fn number_json_round_trip() {
        let n: Number = serde_json::from_str("0.3").unwrap();
        assert_eq!(n.0, q(3, 10));
        let n: Number = serde_json::from_str("\"7/3\"").unwrap();
        assert_eq!(n.0, q(7, 3));
        assert_eq!(serde_json::to_string(&n).unwrap(), "\"7/3\"");
        let n: Number = serde_json::from_str("4").unwrap();
        assert_eq!(serde_json::to_string(&n).unwrap(), "4");
    }

    #[test]
    fn exact_tolerances_are_zero() {
        assert!(Rational::tol(1e-9).is_zero());
        assert_eq!(f64::tol(1e-9), 1e-9);
        assert!(q(1, 3).approx_eq(&q(2, 6), 1.0, 1.0));
        assert!(!q(1, 3).approx_eq(&q(1, 2), 1.0, 1.0));
        assert!(1.0f64.approx_eq(&(1.0 + 1e-10), 1e-9, 0.0));
    }
}
