//! Superadditive value tables `h(m, alpha)` on the lattice points of `mP`.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::ToricHomNorm;
use crate::error::{Error, Result};
use crate::fdnorm::FiniteDimNorm;
use crate::measure::DiscreteMeasure;
use crate::polytope::{biconjugate_samples, RationalPolytope};
use crate::rational::{floor_q, Q};

pub type Level = BTreeMap<Vec<i64>, Q>;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedToricNorm {
    carrier: RationalPolytope,
    base_degree: u32,
    bound: Q,
    levels: BTreeMap<u32, Level>,
}

impl TruncatedToricNorm {
    /// Validates the lattice layout of every level, the growth bound
    /// `|h(m, .)| <= bound * m`, and superadditivity wherever all three
    /// entries are tabulated.
    pub fn new(carrier: RationalPolytope, base_degree: u32, bound: Q, levels: BTreeMap<u32, Level>) -> Result<Self> {
        if base_degree == 0 || levels.is_empty() {
            return Err(Error::InvalidInput("need a positive base degree and at least one level".into()));
        }
        for (&m, level) in &levels {
            if m == 0 || m % base_degree != 0 {
                return Err(Error::InvalidInput(format!("degree {m} is not a multiple of {base_degree}")));
            }
            let keys = carrier.lattice_points(m);
            if keys.len() != level.len() || keys.iter().any(|k| !level.contains_key(k)) {
                return Err(Error::InvalidInput(format!("level {m} does not match the lattice points of {m}P")));
            }
            let cap = &bound * Q::from_integer(m.into());
            if let Some((k, v)) = level.iter().find(|(_, v)| v.abs() > cap) {
                return Err(Error::InvalidInput(format!("|h({m}, {k:?})| = {} exceeds {cap}", v.abs())));
            }
        }
        let degrees: Vec<u32> = levels.keys().copied().collect();
        for (i, &m1) in degrees.iter().enumerate() {
            for &m2 in &degrees[i..] {
                let Some(sum) = levels.get(&(m1 + m2)) else { continue };
                for (a, ha) in &levels[&m1] {
                    for (b, hb) in &levels[&m2] {
                        let c: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        if sum[&c] < ha + hb {
                            return Err(Error::InvalidInput(format!(
                                "superadditivity fails: h({}, {c:?}) < h({m1}, {a:?}) + h({m2}, {b:?})",
                                m1 + m2
                            )));
                        }
                    }
                }
            }
        }
        Ok(TruncatedToricNorm { carrier, base_degree, bound, levels })
    }

    /// Tabulates `f(m, beta)` at the given degrees.
    pub fn from_fn(
        carrier: RationalPolytope,
        base_degree: u32,
        degrees: &[u32],
        bound: Q,
        f: impl Fn(u32, &[i64]) -> Q,
    ) -> Result<Self> {
        let levels = degrees
            .iter()
            .map(|&m| (m, carrier.lattice_points(m).into_iter().map(|b| {
                let v = f(m, &b);
                (b, v)
            }).collect()))
            .collect();
        Self::new(carrier, base_degree, bound, levels)
    }

    /// `h(m, beta) = m g(beta/m)`, the restriction of a homogeneous norm.
    pub fn from_hom(norm: &ToricHomNorm, base_degree: u32, degrees: &[u32]) -> Result<Self> {
        let carrier = norm.carrier().clone();
        let mut levels = BTreeMap::new();
        for &m in degrees {
            let values = norm.restriction(m)?;
            let keys = carrier.lattice_points(m);
            levels.insert(m, keys.into_iter().zip(values.values().iter().cloned()).collect::<Level>());
        }
        let bound = max_ratio(&levels);
        Self::new(carrier, base_degree, bound, levels)
    }

    /// The norm generated in degree `d` by `h_d`: the superadditive closure
    /// `h(rd, gamma) = max { h(d, a) + h((r-1)d, gamma - a) }`, for
    /// `r = 1..=multiples`.
    pub fn generated(carrier: RationalPolytope, d: u32, h_d: Level, multiples: u32) -> Result<Self> {
        let mut levels = BTreeMap::new();
        levels.insert(d, h_d);
        for r in 2..=multiples {
            let mut next: Level = BTreeMap::new();
            for (a, ha) in &levels[&d] {
                for (b, hb) in &levels[&((r - 1) * d)] {
                    let c: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    let v = ha + hb;
                    match next.get_mut(&c) {
                        Some(cur) if *cur >= v => {}
                        Some(cur) => *cur = v,
                        None => {
                            next.insert(c, v);
                        }
                    }
                }
            }
            if next.len() != carrier.lattice_points(r * d).len() {
                return Err(Error::Unsupported(format!("degree {} is not generated in degree {d}", r * d)));
            }
            levels.insert(r * d, next);
        }
        let bound = max_ratio(&levels);
        Self::new(carrier, d, bound, levels)
    }

    pub fn carrier(&self) -> &RationalPolytope {
        &self.carrier
    }

    pub fn base_degree(&self) -> u32 {
        self.base_degree
    }

    pub fn bound(&self) -> &Q {
        &self.bound
    }

    pub fn degrees(&self) -> impl Iterator<Item = u32> + '_ {
        self.levels.keys().copied()
    }

    pub fn level(&self, m: u32) -> Result<&Level> {
        self.levels.get(&m).ok_or(Error::Untabulated(m))
    }

    pub fn value(&self, m: u32, beta: &[i64]) -> Option<&Q> {
        self.levels.get(&m)?.get(beta)
    }

    /// Finite-level spectral measure scaled by `1/m`: uniform mass on the
    /// values `h(m, beta)/m`.
    pub fn spectral_measure(&self, m: u32) -> Result<DiscreteMeasure<Q>> {
        let mq = Q::from_integer(m.into());
        DiscreteMeasure::from_weights(self.level(m)?.values().map(|v| (v / &mq, Q::from_integer(1.into()))))
    }

    /// Floors every entry. Superadditivity survives and the growth bound
    /// grows by at most one.
    pub fn round_down(&self) -> TruncatedToricNorm {
        let levels = self
            .levels
            .iter()
            .map(|(&m, l)| (m, l.iter().map(|(k, v)| (k.clone(), floor_q(v))).collect()))
            .collect();
        TruncatedToricNorm {
            carrier: self.carrier.clone(),
            base_degree: self.base_degree,
            bound: &self.bound + Q::from_integer(1.into()),
            levels,
        }
    }

    /// Diagonal norm on the degree-`m` monomials, in lattice-point order.
    pub fn restriction(&self, m: u32) -> Result<FiniteDimNorm> {
        Ok(FiniteDimNorm::diagonal(self.level(m)?.values().cloned().collect()))
    }

    /// Concave envelope of `(beta/d, h(d, beta)/d)`.
    pub fn canonical_approximant(&self, d: u32) -> Result<ToricHomNorm> {
        let level = self.level(d)?;
        let dq = Q::from_integer(d.into());
        let samples: Vec<(Vec<Q>, Q)> = level
            .iter()
            .map(|(b, v)| (b.iter().map(|&x| Q::from_integer(x.into()) / &dq).collect(), v / &dq))
            .collect();
        Ok(ToricHomNorm::Pl(biconjugate_samples(&self.carrier, &samples)?))
    }
}

fn max_ratio(levels: &BTreeMap<u32, Level>) -> Q {
    levels
        .iter()
        .flat_map(|(&m, l)| l.values().map(move |v| v.abs() / Q::from_integer(m.into())))
        .max()
        .unwrap_or_else(Q::zero)
}
