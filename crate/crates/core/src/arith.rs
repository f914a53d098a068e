//! Exact rationals and the extended half-line `Q ∪ {+∞}`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qvec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q> {
    let err = || Error::Parse { what: "rational", input: s.to_string() };
    let t = s.trim();
    match t.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().map_err(|_| err())?;
            let d: BigInt = b.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(t.parse().map_err(|_| err())?)),
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

/// Integer value of `x`; `None` when `x` is not an integer or does not fit.
pub fn q_to_i64(x: &Q) -> Option<i64> {
    if x.denom().is_one() {
        x.numer().to_i64()
    } else {
        None
    }
}

pub fn is_nonneg(x: &Q) -> bool {
    !x.is_negative()
}

/// Serde adapter writing a rational as the string `p/q`.
pub mod qstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).map_err(serde::de::Error::custom)
    }

    pub(crate) fn value_to_q(v: &serde_json::Value) -> std::result::Result<Q, String> {
        match v {
            serde_json::Value::String(s) => parse_q(s).map_err(|e| e.to_string()),
            serde_json::Value::Number(n) => n
                .as_i64()
                .map(q)
                .ok_or_else(|| format!("rational must be an integer or a \"p/q\" string, got {n}")),
            other => Err(format!("expected rational, got {other}")),
        }
    }
}

/// Serde adapter for `Vec<Q>` as a list of `p/q` strings.
pub mod qvecstr {
    use super::*;

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(x.iter().map(fmt_q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        let v = Vec::<serde_json::Value>::deserialize(d)?;
        v.iter()
            .map(|x| qstr::value_to_q(x).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// An element of `Q ∪ {+∞}`. `+∞` absorbs addition and is the top element.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExtQ {
    Finite(Q),
    Infinity,
}

impl ExtQ {
    pub fn zero() -> Self {
        ExtQ::Finite(Q::zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtQ::Infinity)
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtQ::Finite(x) => Some(x),
            ExtQ::Infinity => None,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Product with a nonnegative rational. `0 · ∞ = 0`.
    pub fn scale(&self, a: &Q) -> Result<Self> {
        if a.is_negative() {
            return Err(Error::Undefined("negative multiple of an extended value".into()));
        }
        Ok(match self {
            ExtQ::Finite(x) => ExtQ::Finite(x * a),
            ExtQ::Infinity if a.is_zero() => ExtQ::zero(),
            ExtQ::Infinity => ExtQ::Infinity,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(ExtQ::Infinity),
            t => parse_q(t).map(ExtQ::Finite),
        }
    }
}

impl From<Q> for ExtQ {
    fn from(x: Q) -> Self {
        ExtQ::Finite(x)
    }
}

impl PartialOrd for ExtQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtQ {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtQ::Finite(a), ExtQ::Finite(b)) => a.cmp(b),
            (ExtQ::Finite(_), ExtQ::Infinity) => Ordering::Less,
            (ExtQ::Infinity, ExtQ::Finite(_)) => Ordering::Greater,
            (ExtQ::Infinity, ExtQ::Infinity) => Ordering::Equal,
        }
    }
}

impl Add for ExtQ {
    type Output = ExtQ;
    fn add(self, rhs: ExtQ) -> ExtQ {
        match (self, rhs) {
            (ExtQ::Finite(a), ExtQ::Finite(b)) => ExtQ::Finite(a + b),
            _ => ExtQ::Infinity,
        }
    }
}

impl<'a> Add<&'a ExtQ> for &'a ExtQ {
    type Output = ExtQ;
    fn add(self, rhs: &ExtQ) -> ExtQ {
        match (self, rhs) {
            (ExtQ::Finite(a), ExtQ::Finite(b)) => ExtQ::Finite(a + b),
            _ => ExtQ::Infinity,
        }
    }
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::Finite(x) => f.write_str(&fmt_q(x)),
            ExtQ::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtQ {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match &v {
            serde_json::Value::String(s) => ExtQ::parse(s).map_err(serde::de::Error::custom),
            other => qstr::value_to_q(other).map(ExtQ::Finite).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        for s in ["0", "-3", "7/2", "-5/6"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("4/6").unwrap(), qr(2, 3));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn infinity_absorbs_and_dominates() {
        let a = ExtQ::Finite(qr(1, 2));
        assert_eq!(a.clone() + ExtQ::Infinity, ExtQ::Infinity);
        assert_eq!(a.clone().min(ExtQ::Infinity), a);
        assert!(ExtQ::Infinity > ExtQ::Finite(q(1_000_000)));
        assert_eq!(ExtQ::Infinity.scale(&q(0)).unwrap(), ExtQ::zero());
        assert_eq!(ExtQ::parse("inf").unwrap(), ExtQ::Infinity);
    }
}
