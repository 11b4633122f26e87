//! The integrability exponent `q ∈ [1, ∞]`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::gaussian::rational_string;
use crate::padic::parse_rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(BigRational),
    Infinite,
}

impl Exponent {
    pub fn finite(q: BigRational) -> Result<Self> {
        if q < BigRational::one() {
            return Err(Error::InvalidExponent(rational_string(&q)));
        }
        Ok(Self::Finite(q))
    }

    pub fn integer(q: i64) -> Result<Self> {
        Self::finite(BigRational::from_integer(q.into()))
    }

    pub fn one() -> Self {
        Self::Finite(BigRational::one())
    }

    pub fn two() -> Self {
        Self::Finite(BigRational::from_integer(2.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }

    pub fn as_f64(&self) -> f64 {
        match self {
            Self::Finite(q) => q.to_f64().unwrap_or(f64::INFINITY),
            Self::Infinite => f64::INFINITY,
        }
    }

    /// `1/q`, zero at infinity.
    pub fn reciprocal(&self) -> f64 {
        match self {
            Self::Finite(q) => q.recip().to_f64().unwrap_or(0.0),
            Self::Infinite => 0.0,
        }
    }

    /// Convergence threshold `p^{1/q}`.
    pub fn threshold(&self, p: u64) -> f64 {
        (p as f64).powf(self.reciprocal())
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(Self::Infinite),
            _ => Self::finite(parse_rational(t).map_err(|_| Error::InvalidExponent(s.into()))?),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{}", rational_string(q)),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_threshold() {
        let q: Exponent = "2".parse().unwrap();
        assert!((q.threshold(3) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!("inf".parse::<Exponent>().unwrap().threshold(5), 1.0);
        assert_eq!("3/2".parse::<Exponent>().unwrap().to_string(), "3/2");
        assert!("1/2".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
    }

    #[test]
    fn serde_as_string() {
        let s = serde_json::to_string(&Exponent::Infinite).unwrap();
        assert_eq!(s, "\"inf\"");
        let q: Exponent = serde_json::from_str("\"5/2\"").unwrap();
        assert_eq!(q.as_f64(), 2.5);
    }
}
