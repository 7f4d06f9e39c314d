//! Exact rational scalars and the helpers shared by every kernel.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qv(xs: &[i64]) -> Vec<Q> {
    xs.iter().map(|&x| q(x)).collect()
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n = BigInt::from_str(num).map_err(|_| Error::InvalidInput(format!("bad rational {s:?}")))?;
    let d = BigInt::from_str(den).map_err(|_| Error::InvalidInput(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::InvalidInput(format!("zero denominator in {s:?}")));
    }
    Ok(Q::new(n, d))
}

/// Canonical `"p/q"` rendering (`"p"` for integers).
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // huge numerators or denominators: scale down first
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn floor_q(x: &Q) -> Q {
    Q::from_integer(x.numer().div_floor(x.denom()))
}

pub fn ceil_q(x: &Q) -> Q {
    -floor_q(&-x)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

pub fn pow_q(x: &Q, p: u32) -> Q {
    let mut r = Q::one();
    for _ in 0..p {
        r *= x;
    }
    r
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn max_q<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    xs.into_iter().max().cloned()
}

pub fn min_q<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    xs.into_iter().min().cloned()
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// via continued-fraction convergents and the final semiconvergent.
pub fn rationalize(x: f64, max_den: u64) -> Q {
    assert!(x.is_finite(), "cannot rationalize a non-finite value");
    let neg = x < 0.0;
    let mut v = x.abs();
    let (mut p0, mut q0, mut p1, mut q1): (u128, u128, u128, u128) = (0, 1, 1, 0);
    let max_den = max_den as u128;
    for _ in 0..64 {
        let a = v.floor();
        if a > 1e30 {
            break;
        }
        let a_int = a as u128;
        let p2 = a_int * p1 + p0;
        let q2 = a_int * q1 + q0;
        if q2 > max_den {
            // largest semiconvergent within the bound
            let k = (max_den - q0) / q1;
            let ps = k * p1 + p0;
            let qs = k * q1 + q0;
            let cand = |p: u128, q: u128| (p as f64 / q as f64 - x.abs()).abs();
            if qs > 0 && cand(ps, qs) < cand(p1, q1) {
                p1 = ps;
                q1 = qs;
            }
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let frac = v - a;
        if frac < 1e-300 {
            break;
        }
        v = 1.0 / frac;
    }
    let r = Q::new(BigInt::from(p1), BigInt::from(q1));
    if neg {
        -r
    } else {
        r
    }
}

/// A rational extended by `+∞`, the value of a norm at the zero vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtQ {
    Finite(Q),
    PosInf,
}

impl ExtQ {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            ExtQ::Finite(x) => Some(x),
            ExtQ::PosInf => None,
        }
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
            (ExtQ::Finite(_), ExtQ::PosInf) => Ordering::Less,
            (ExtQ::PosInf, ExtQ::Finite(_)) => Ordering::Greater,
            (ExtQ::PosInf, ExtQ::PosInf) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtQ::Finite(x) => write!(f, "{x}"),
            ExtQ::PosInf => write!(f, "+inf"),
        }
    }
}

/// Binomial coefficient as an exact rational.
pub fn binomial(n: u64, k: u64) -> Q {
    if k > n {
        return Q::zero();
    }
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(r)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Serde adapters writing rationals as `"p/q"` strings.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Points serialize as a bare `"p/q"` string in dimension one and as an
/// array of strings otherwise.
pub mod serde_point {
    use super::*;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Scalar(String),
        Vector(Vec<String>),
    }

    pub fn serialize<S: Serializer>(x: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.len() == 1 {
            s.serialize_str(&fmt_q(&x[0]))
        } else {
            x.iter().map(fmt_q).collect::<Vec<_>>().serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Scalar(s) => Ok(vec![parse_q(&s).map_err(serde::de::Error::custom)?]),
            Raw::Vector(v) => v
                .iter()
                .map(|s| parse_q(s).map_err(serde::de::Error::custom))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_q("1/3").unwrap(), qr(1, 3));
        assert_eq!(parse_q("-4/6").unwrap(), qr(-2, 3));
        assert_eq!(parse_q(" 7 ").unwrap(), q(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
        assert_eq!(fmt_q(&qr(2, 6)), "1/3");
        assert_eq!(fmt_q(&q(-5)), "-5");
    }

    #[test]
    fn floors() {
        assert_eq!(floor_q(&qr(-1, 2)), q(-1));
        assert_eq!(floor_q(&qr(7, 3)), q(2));
        assert_eq!(ceil_q(&qr(7, 3)), q(3));
        assert_eq!(ceil_q(&q(2)), q(2));
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.5, 1_000_000), qr(1, 2));
        assert_eq!(rationalize(-1.0 / 3.0, 1_000_000), qr(-1, 3));
        assert_eq!(rationalize(0.0, 10), q(0));
        let pi = rationalize(std::f64::consts::PI, 1000);
        assert!(*pi.denom() <= BigInt::from(1000));
        assert!((to_f64(&pi) - std::f64::consts::PI).abs() < 1e-6);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), q(10));
        assert_eq!(binomial(3, 0), q(1));
        assert_eq!(binomial(2, 3), q(0));
    }

    #[test]
    fn extended_order() {
        assert!(ExtQ::Finite(q(100)) < ExtQ::PosInf);
        assert!(ExtQ::Finite(q(-1)) < ExtQ::Finite(q(0)));
    }
}
