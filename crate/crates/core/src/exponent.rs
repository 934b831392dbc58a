//! Lebesgue exponents in `[1, ∞]` (or beyond, for validation) kept as exact
//! rationals so admissibility and scaling can be decided without rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub fn from_integer(p: i64) -> Self {
        Exponent::Finite(Rational64::from_integer(p))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Exponent::Finite(Rational64::new(num, den))
    }

    /// Builds `p` from `1/p`; a zero reciprocal is `∞`.
    pub fn from_reciprocal(inv: Rational64) -> Result<Self> {
        if inv.is_negative() {
            return Err(Error::Domain(format!("negative reciprocal exponent 1/p = {inv}")));
        }
        Ok(if inv.is_zero() { Exponent::Infinite } else { Exponent::Finite(inv.recip()) })
    }

    pub fn reciprocal(self) -> Rational64 {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational64::zero(),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    pub fn is_below_one(self) -> bool {
        matches!(self, Exponent::Finite(p) if p < Rational64::one())
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Exponent::Finite(p) => *p.numer() as f64 / *p.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// Hölder conjugate `p'`.
    pub fn conjugate(self) -> Result<Self> {
        if self.is_below_one() {
            return Err(Error::Domain(format!("no conjugate exponent for p = {self}")));
        }
        Exponent::from_reciprocal(Rational64::one() - self.reciprocal())
    }

    /// Exact conversion of a float that is a rational with denominator ≤ 10⁶.
    pub fn from_f64(p: f64) -> Result<Self> {
        if p == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        if !p.is_finite() || p <= 0.0 {
            return Err(Error::Domain(format!("exponent must be positive, got {p}")));
        }
        let r = Rational64::approximate_float(p)
            .filter(|r| *r.denom() <= 1_000_000 && (*r.numer() as f64 / *r.denom() as f64) == p)
            .ok_or_else(|| Error::Domain(format!("exponent {p} is not an exact rational; write it as \"a/b\"")))?;
        Ok(Exponent::Finite(r))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t {
            "inf" | "infinity" | "∞" => return Ok(Exponent::Infinite),
            _ => {}
        }
        let bad = || Error::Format(format!("cannot parse exponent {s:?}; expected an integer, \"a/b\" or \"inf\""));
        let r = if let Some((a, b)) = t.split_once('/') {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Rational64::new(a, b)
        } else if let Ok(i) = t.parse::<i64>() {
            Rational64::from_integer(i)
        } else {
            return Exponent::from_f64(t.parse::<f64>().map_err(|_| bad())?);
        };
        if !r.is_positive() {
            return Err(Error::Domain(format!("exponent must be positive, got {s}")));
        }
        Ok(Exponent::Finite(r))
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Int(i) if i > 0 => Ok(Exponent::from_integer(i)),
            Raw::Int(i) => Err(de::Error::custom(format!("exponent must be positive, got {i}"))),
            Raw::Float(x) => Exponent::from_f64(x).map_err(de::Error::custom),
            Raw::Text(s) => s.parse().map_err(de::Error::custom),
        }
    }
}
