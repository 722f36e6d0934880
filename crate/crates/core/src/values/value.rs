use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An exact non-negative rational distance value.
///
/// The underlying rational is always reduced, so equality is structural and
/// `max`/`min` return one of their arguments unchanged.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Value(BigRational);

impl Value {
    pub fn zero() -> Self {
        Value(BigRational::zero())
    }

    pub fn one() -> Self {
        Value(BigRational::one())
    }

    pub fn from_int(n: u64) -> Self {
        Value(BigRational::from_integer(BigInt::from(n)))
    }

    /// `numer / denom`; panics if `denom == 0`.
    pub fn ratio(numer: u64, denom: u64) -> Self {
        assert!(denom != 0, "zero denominator");
        Value(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Wraps a rational, rejecting negatives.
    pub fn from_rational(r: BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Parse(r.to_string()));
        }
        Ok(Value(r))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    /// `self ∨ other`.
    pub fn join(&self, other: &Value) -> Value {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `self ∧ other`.
    pub fn meet(&self, other: &Value) -> Value {
        if self <= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn add(&self, other: &Value) -> Value {
        Value(&self.0 + &other.0)
    }

    pub fn mul(&self, other: &Value) -> Value {
        Value(&self.0 * &other.0)
    }

    /// `self / other`; panics on division by zero.
    pub fn div(&self, other: &Value) -> Value {
        assert!(!other.is_zero(), "division by zero value");
        Value(&self.0 / &other.0)
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Value) -> Value {
        Value((&self.0 - &other.0).abs())
    }

    /// `self - other` when non-negative.
    pub fn checked_sub(&self, other: &Value) -> Option<Value> {
        if self >= other {
            Some(Value(&self.0 - &other.0))
        } else {
            None
        }
    }

    /// Integer power; negative exponents need a non-zero base.
    pub fn pow(&self, exp: i64) -> Value {
        if exp < 0 {
            assert!(!self.is_zero(), "zero to a negative power");
        }
        let magnitude = exp.unsigned_abs();
        let base = if exp < 0 { self.0.recip() } else { self.0.clone() };
        let numer = num_traits::pow::pow(base.numer().clone(), magnitude as usize);
        let denom = num_traits::pow::pow(base.denom().clone(), magnitude as usize);
        Value(BigRational::new(numer, denom))
    }

    /// Largest integer `k` with `k <= self`.
    pub fn floor_int(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    /// Smallest integer `k` with `k >= self`.
    pub fn ceil_int(&self) -> BigInt {
        self.0.numer().div_ceil(self.0.denom())
    }

    /// Lossy conversion, for heuristics and display only.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::INFINITY)
    }

    /// True iff the denominator is a power of two.
    pub fn is_dyadic(&self) -> bool {
        let d = self.0.denom();
        let (sign, bytes) = d.to_bytes_le();
        debug_assert_eq!(sign, Sign::Plus);
        let ones: u32 = bytes.iter().map(|b| b.count_ones()).sum();
        ones == 1
    }
}

impl From<u64> for Value {
    fn from(n: u64) -> Self {
        Value::from_int(n)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Value {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let parse_int = |p: &str| -> Result<BigInt> {
            if p.is_empty() || !p.bytes().all(|b| b.is_ascii_digit()) {
                return Err(Error::Parse(s.to_string()));
            }
            p.parse::<BigInt>().map_err(|_| Error::Parse(s.to_string()))
        };
        let r = match t.split_once('/') {
            Some((n, d)) => {
                let numer = parse_int(n.trim())?;
                let denom = parse_int(d.trim())?;
                if denom.is_zero() {
                    return Err(Error::Parse(s.to_string()));
                }
                BigRational::new(numer, denom)
            }
            None => BigRational::from_integer(parse_int(t)?),
        };
        Ok(Value(r))
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct Visitor;

        impl<'de> de::Visitor<'de> for Visitor {
            type Value = Value;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational string \"p/q\" or a non-negative integer")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Value, E> {
                v.parse().map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Value, E> {
                Ok(Value::from_int(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Value, E> {
                u64::try_from(v)
                    .map(Value::from_int)
                    .map_err(|_| E::custom("negative distance value"))
            }
        }

        deserializer.deserialize_any(Visitor)
    }
}

/// Shorthand used throughout the tests: `v("3/4")`.
pub fn v(s: &str) -> Value {
    s.parse().unwrap_or_else(|e| panic!("bad value literal {s:?}: {e}"))
}
