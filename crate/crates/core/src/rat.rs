//! Exact rational scalars.
//!
//! All order-sensitive arithmetic in this crate (interval endpoints,
//! spectral thresholds) runs on arbitrary-precision rationals. Floating
//! point only enters through the numerical linear algebra, and every
//! `f64` that crosses back is converted exactly (every finite double is
//! a dyadic rational).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

/// An exact rational number.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// Exact conversion: every finite `f64` is a dyadic rational.
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_f64(x).map(Rat)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Parses `"p/q"`, plain integers and exact decimal strings
    /// (`"-3.25"` becomes `-13/4`). Exponents are not supported.
    pub fn parse(s: &str) -> Result<Self, RatParseError> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RatParseError(s.to_string()));
        }
        if let Some((num, den)) = s.split_once('/') {
            let n = BigInt::from_str(num.trim()).map_err(|_| RatParseError(s.to_string()))?;
            let d = BigInt::from_str(den.trim()).map_err(|_| RatParseError(s.to_string()))?;
            if d.is_zero() {
                return Err(RatParseError(s.to_string()));
            }
            return Ok(Rat(BigRational::new(n, d)));
        }
        if let Some((int_part, frac_part)) = s.split_once('.') {
            let negative = int_part.starts_with('-');
            let int_digits = if int_part == "-" || int_part.is_empty() {
                "0".to_string()
            } else {
                int_part.trim_start_matches(['+', '-']).to_string()
            };
            if frac_part.is_empty() || !frac_part.chars().all(|c| c.is_ascii_digit()) {
                return Err(RatParseError(s.to_string()));
            }
            let whole = BigInt::from_str(&int_digits).map_err(|_| RatParseError(s.to_string()))?;
            let frac = BigInt::from_str(frac_part).map_err(|_| RatParseError(s.to_string()))?;
            let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
            let mut value = BigRational::new(whole * &scale + frac, scale);
            if negative {
                value = -value;
            }
            return Ok(Rat(value));
        }
        let n = BigInt::from_str(s).map_err(|_| RatParseError(s.to_string()))?;
        Ok(Rat(BigRational::from_integer(n)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a rational literal: {0:?}")]
pub struct RatParseError(pub String);

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rat({})", self)
    }
}

impl FromStr for Rat {
    type Err = RatParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rat::parse(s)
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

struct RatVisitor;

impl Visitor<'_> for RatVisitor {
    type Value = Rat;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as string (\"p/q\" or decimal) or number")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rat, E> {
        Rat::parse(v).map_err(de::Error::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rat, E> {
        Ok(Rat::from_int(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rat, E> {
        Ok(Rat(BigRational::from_integer(BigInt::from(v))))
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> Result<Rat, E> {
        Rat::from_f64_exact(v).ok_or_else(|| de::Error::custom("non-finite float"))
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RatVisitor)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((self.0).$method(rhs.0))
            }
        }
        impl<'a> $trait<&'a Rat> for &'a Rat {
            type Output = Rat;
            fn $method(self, rhs: &'a Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_integers() {
        assert_eq!(Rat::parse("5/2").unwrap(), Rat::new(5, 2));
        assert_eq!(Rat::parse("-3/4").unwrap(), Rat::new(-3, 4));
        assert_eq!(Rat::parse("2.5").unwrap(), Rat::new(5, 2));
        assert_eq!(Rat::parse("-0.125").unwrap(), Rat::new(-1, 8));
        assert_eq!(Rat::parse("7").unwrap(), Rat::from_int(7));
        assert_eq!(Rat::parse(" 10/4 ").unwrap(), Rat::new(5, 2));
    }

    #[test]
    fn rejects_garbage() {
        assert!(Rat::parse("").is_err());
        assert!(Rat::parse("1/0").is_err());
        assert!(Rat::parse("1.2.3").is_err());
        assert!(Rat::parse("abc").is_err());
    }

    #[test]
    fn f64_round_trip_is_exact() {
        let x = 0.1f64;
        let r = Rat::from_f64_exact(x).unwrap();
        assert_eq!(r.to_f64(), x);
        assert_ne!(r, Rat::new(1, 10)); // 0.1 is not exactly 1/10 in binary
    }

    #[test]
    fn display_and_serde() {
        let r = Rat::new(5, 2);
        assert_eq!(r.to_string(), "5/2");
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"5/2\"");
        let back: Rat = serde_json::from_str("\"5/2\"").unwrap();
        assert_eq!(back, r);
        let from_int: Rat = serde_json::from_str("3").unwrap();
        assert_eq!(from_int, Rat::from_int(3));
    }
}
