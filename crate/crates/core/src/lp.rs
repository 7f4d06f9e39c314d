//! `L^p` exponents and distance values.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{parse_q, pow_q, to_f64, Q};

/// Exponent `p` in `[1, +inf]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exponent {
    Finite(Q),
    Infinity,
}

impl Exponent {
    pub fn int(p: u32) -> Self {
        Exponent::Finite(Q::from_integer(p.into()))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "+inf" => Ok(Exponent::Infinity),
            other => Ok(Exponent::Finite(parse_q(other)?)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Exponent::Finite(p) if p < &Q::one() => {
                Err(Error::InvalidExponent(format!("p = {p} is below 1")))
            }
            _ => Ok(()),
        }
    }

    /// The exponent as a positive integer, if it is one.
    pub fn as_integer(&self) -> Option<u32> {
        match self {
            Exponent::Finite(p) if p.is_integer() => p.to_integer().to_u32(),
            _ => None,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinity => write!(f, "inf"),
        }
    }
}

/// A `d_p` value. For integer `p` the exact quantity is `d_p^p`; for
/// `p = inf` it is `d_inf` itself. Non-integer exponents only carry the
/// binary64 value.
#[derive(Clone, Debug, PartialEq)]
pub struct Distance {
    p: Exponent,
    powered: Option<Q>,
    approx: f64,
}

impl Distance {
    /// Builds the `L^p` mean of the given nonnegative deviations, weighted
    /// uniformly.
    pub fn from_deviations(p: &Exponent, deviations: &[Q]) -> Result<Self> {
        p.validate()?;
        let n = Q::from_integer((deviations.len() as i64).into());
        match p {
            Exponent::Infinity => {
                let m = deviations.iter().map(|d| d.abs()).max().unwrap_or_default();
                Ok(Distance::exact(p.clone(), m))
            }
            _ => match p.as_integer() {
                Some(k) => {
                    let s: Q = deviations.iter().map(|d| pow_q(&d.abs(), k)).sum();
                    Ok(Distance::exact(p.clone(), s / n))
                }
                None => {
                    let pf = to_f64(match p {
                        Exponent::Finite(x) => x,
                        Exponent::Infinity => unreachable!(),
                    });
                    let s: f64 = deviations.iter().map(|d| to_f64(&d.abs()).powf(pf)).sum();
                    let mean = s / deviations.len() as f64;
                    Ok(Distance { p: p.clone(), powered: None, approx: mean.powf(1.0 / pf) })
                }
            },
        }
    }

    /// `powered` is `d^p` for integer `p`, or `d` for `p = inf`.
    pub fn exact(p: Exponent, powered: Q) -> Self {
        let approx = match p.as_integer() {
            Some(k) if k > 1 => to_f64(&powered).powf(1.0 / k as f64),
            _ => to_f64(&powered),
        };
        Distance { p, powered: Some(powered), approx }
    }

    pub fn exponent(&self) -> &Exponent {
        &self.p
    }

    /// Exact `d^p` (or `d` for `p = inf`), when representable.
    pub fn powered(&self) -> Option<&Q> {
        self.powered.as_ref()
    }

    /// The distance itself, exact for `p = 1` and `p = inf`.
    pub fn exact_value(&self) -> Option<&Q> {
        match (&self.p, &self.powered) {
            (Exponent::Infinity, Some(v)) => Some(v),
            (p, Some(v)) if p.as_integer() == Some(1) => Some(v),
            _ => None,
        }
    }

    /// Binary64 value of the distance (the `p`-th root taken in floating point).
    pub fn to_f64(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.powered.as_ref().map_or(self.approx == 0.0, Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn means_of_deviations() {
        let dev = vec![q(2), q(0)];
        let d1 = Distance::from_deviations(&Exponent::int(1), &dev).unwrap();
        assert_eq!(d1.exact_value(), Some(&q(1)));
        let d2 = Distance::from_deviations(&Exponent::int(2), &dev).unwrap();
        assert_eq!(d2.powered(), Some(&q(2)));
        assert!(d2.exact_value().is_none());
        assert!((d2.to_f64() - 2f64.sqrt()).abs() < 1e-12);
        let di = Distance::from_deviations(&Exponent::Infinity, &dev).unwrap();
        assert_eq!(di.exact_value(), Some(&q(2)));
        let dh = Distance::from_deviations(&Exponent::Finite(qr(3, 2)), &dev).unwrap();
        assert!(dh.powered().is_none());
        assert!((dh.to_f64() - (2f64.powf(1.5) / 2.0).powf(2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_exponent() {
        let e = Distance::from_deviations(&Exponent::Finite(qr(1, 2)), &[q(1)]);
        assert!(matches!(e, Err(Error::InvalidExponent(_))));
        assert_eq!(Exponent::parse("inf").unwrap(), Exponent::Infinity);
        assert_eq!(Exponent::parse("3").unwrap().as_integer(), Some(3));
    }
}
