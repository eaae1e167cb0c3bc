//! Exact rationals whose denominator is a power of three.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub fn pow3(e: u32) -> BigUint {
    BigUint::from(3u32).pow(e)
}

pub fn pow3_int(e: u32) -> BigInt {
    BigInt::from(3).pow(e)
}

/// `numerator / 3^exponent`, reduced so that the numerator is not a multiple
/// of three unless the exponent is zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ternary {
    numerator: BigInt,
    exponent: u32,
}

impl Ternary {
    pub fn new(numerator: impl Into<BigInt>, exponent: u32) -> Self {
        let mut numerator = numerator.into();
        let mut exponent = exponent;
        let three = BigInt::from(3);
        while exponent > 0 && !numerator.is_zero() && numerator.is_multiple_of(&three) {
            numerator /= &three;
            exponent -= 1;
        }
        if numerator.is_zero() {
            exponent = 0;
        }
        Ternary {
            numerator,
            exponent,
        }
    }

    pub fn zero() -> Self {
        Ternary::new(0, 0)
    }

    pub fn one() -> Self {
        Ternary::new(1, 0)
    }

    /// `3^-e`.
    pub fn unit(e: u32) -> Self {
        Ternary::new(1, e)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    /// The numerator when the value is written over `3^e` (requires `e >= exponent`).
    pub fn scaled_numerator(&self, e: u32) -> BigInt {
        assert!(e >= self.exponent, "cannot scale 3^{} down to 3^{}", self.exponent, e);
        &self.numerator * pow3_int(e - self.exponent)
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.numerator.clone(), pow3_int(self.exponent))
    }

    /// Exact conversion back from a rational; `None` when the reduced
    /// denominator is not a power of three.
    pub fn from_rational(q: &BigRational) -> Option<Ternary> {
        let mut d = q.denom().clone();
        let three = BigInt::from(3);
        let mut e = 0u32;
        while d > BigInt::one() {
            if !d.is_multiple_of(&three) {
                return None;
            }
            d /= &three;
            e += 1;
        }
        Some(Ternary::new(q.numer().clone(), e))
    }

    pub fn abs(&self) -> Ternary {
        Ternary::new(self.numerator.abs(), self.exponent)
    }

    pub fn is_negative(&self) -> bool {
        self.numerator.is_negative()
    }

    /// Smallest `e` with `3^-e <= q`; `None` unless `q > 0`.
    pub fn pow3_at_most(q: &BigRational) -> Option<u32> {
        if !q.is_positive() {
            return None;
        }
        let mut e = 0u32;
        let mut p = BigRational::one();
        while &p > q {
            p /= BigRational::from_integer(BigInt::from(3));
            e += 1;
        }
        Some(e)
    }

    pub fn to_f64(&self) -> f64 {
        self.numerator.to_f64().unwrap_or(f64::NAN) / 3f64.powi(self.exponent as i32)
    }

    /// Decimal rendering with `digits` fractional digits (truncated toward
    /// zero). Used only for drawing.
    pub fn to_decimal(&self, scale: u64, digits: u32) -> String {
        let ten = BigInt::from(10).pow(digits);
        let v = &self.numerator * BigInt::from(scale) * &ten;
        let q = v.div_floor(&pow3_int(self.exponent));
        let (int, frac) = q.div_mod_floor(&ten);
        if digits == 0 {
            int.to_string()
        } else {
            format!("{}.{:0>width$}", int, frac.to_string(), width = digits as usize)
        }
    }
}

impl Ord for Ternary {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        self.scaled_numerator(e).cmp(&other.scaled_numerator(e))
    }
}

impl PartialOrd for Ternary {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &Ternary {
    type Output = Ternary;
    fn add(self, rhs: &Ternary) -> Ternary {
        let e = self.exponent.max(rhs.exponent);
        Ternary::new(self.scaled_numerator(e) + rhs.scaled_numerator(e), e)
    }
}

impl Sub for &Ternary {
    type Output = Ternary;
    fn sub(self, rhs: &Ternary) -> Ternary {
        let e = self.exponent.max(rhs.exponent);
        Ternary::new(self.scaled_numerator(e) - rhs.scaled_numerator(e), e)
    }
}

impl Neg for &Ternary {
    type Output = Ternary;
    fn neg(self) -> Ternary {
        Ternary::new(-self.numerator.clone(), self.exponent)
    }
}

impl fmt::Display for Ternary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, pow3(self.exponent))
    }
}

impl FromStr for Ternary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational(s)?;
        Ternary::from_rational(&q)
            .ok_or_else(|| Error::parse(0, format!("\"{s}\" is not a ternary rational")))
    }
}

impl Serialize for Ternary {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Ternary {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("malformed rational \"{s}\""));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(p, q))
}

/// Always renders as `p/q`, including integers (`0/1`, `1/1`).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Serde adapter rendering a rational as `"p/q"`.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter rendering a big integer as a decimal string.
pub mod biguint_str {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(n)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces() {
        let t = Ternary::new(6, 2);
        assert_eq!(t.numerator(), &BigInt::from(2));
        assert_eq!(t.exponent(), 1);
        assert_eq!(Ternary::new(0, 5), Ternary::zero());
        assert_eq!(Ternary::new(9, 2), Ternary::one());
    }

    #[test]
    fn ordering_and_arith() {
        let a = Ternary::new(7, 2);
        let b = Ternary::new(2, 1);
        assert!(a > b);
        assert_eq!(&a - &b, Ternary::new(1, 2));
        assert_eq!(&a + &Ternary::new(2, 2), Ternary::one());
    }

    #[test]
    fn text_forms() {
        assert_eq!(Ternary::new(7, 2).to_string(), "7/9");
        assert_eq!("23/27".parse::<Ternary>().unwrap(), Ternary::new(23, 3));
        assert!("1/2".parse::<Ternary>().is_err());
        assert_eq!(Ternary::new(1, 1).to_decimal(900, 3), "300.000");
        assert_eq!(format_rational(&BigRational::zero()), "0/1");
    }
}
