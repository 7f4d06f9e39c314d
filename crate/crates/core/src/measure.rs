//! Finitely supported probability measures and exact piecewise-polynomial
//! distributions on the line.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::UPoly;
use crate::rational::{fmt_q, pow_q, Q};

/// Something that can carry a point mass: a scalar or an n-vector.
pub trait Atom: Ord + Clone {
    fn to_point(&self) -> Vec<Q>;
    fn from_point(p: Vec<Q>) -> Result<Self>;
}

impl Atom for Q {
    fn to_point(&self) -> Vec<Q> {
        vec![self.clone()]
    }

    fn from_point(p: Vec<Q>) -> Result<Self> {
        match <[Q; 1]>::try_from(p) {
            Ok([x]) => Ok(x),
            Err(p) => Err(Error::DimensionMismatch { expected: 1, found: p.len() }),
        }
    }
}

impl Atom for Vec<Q> {
    fn to_point(&self) -> Vec<Q> {
        self.clone()
    }

    fn from_point(p: Vec<Q>) -> Result<Self> {
        Ok(p)
    }
}

/// Probability measure with finitely many atoms and exact rational masses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteMeasure<A: Atom> {
    atoms: BTreeMap<A, Q>,
}

impl<A: Atom> DiscreteMeasure<A> {
    /// Validates distinct atoms with positive masses summing to one.
    pub fn new(atoms: Vec<(A, Q)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut total = Q::zero();
        for (a, m) in atoms {
            if !m.is_positive() {
                return Err(Error::InvalidMeasure(format!("non-positive mass {m}")));
            }
            total += &m;
            if map.insert(a, m).is_some() {
                return Err(Error::InvalidMeasure("duplicate atom".into()));
            }
        }
        if map.is_empty() {
            return Err(Error::InvalidMeasure("no atoms".into()));
        }
        if !total.is_one() {
            return Err(Error::InvalidMeasure(format!("masses sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms: map })
    }

    /// Normalizes nonnegative weights, merging repeated atoms.
    pub fn from_weights(weights: impl IntoIterator<Item = (A, Q)>) -> Result<Self> {
        let mut map: BTreeMap<A, Q> = BTreeMap::new();
        for (a, w) in weights {
            if w.is_negative() {
                return Err(Error::InvalidMeasure(format!("negative weight {w}")));
            }
            if !w.is_zero() {
                *map.entry(a).or_insert_with(Q::zero) += w;
            }
        }
        let total: Q = map.values().sum();
        if total.is_zero() {
            return Err(Error::InvalidMeasure("zero total weight".into()));
        }
        for m in map.values_mut() {
            *m /= &total;
        }
        Ok(DiscreteMeasure { atoms: map })
    }

    pub fn dirac(a: A) -> Self {
        DiscreteMeasure { atoms: BTreeMap::from([(a, Q::one())]) }
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&A, &Q)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn mass_of(&self, a: &A) -> Q {
        self.atoms.get(a).cloned().unwrap_or_default()
    }

    pub fn pushforward<B: Atom>(&self, f: impl Fn(&A) -> B) -> DiscreteMeasure<B> {
        let mut map: BTreeMap<B, Q> = BTreeMap::new();
        for (a, m) in &self.atoms {
            *map.entry(f(a)).or_insert_with(Q::zero) += m;
        }
        DiscreteMeasure { atoms: map }
    }
}

impl DiscreteMeasure<Q> {
    pub fn mean(&self) -> Q {
        self.atoms.iter().map(|(a, m)| a * m).sum()
    }

    pub fn abs_moment(&self, p: u32) -> Q {
        self.atoms.iter().map(|(a, m)| pow_q(&a.abs(), p) * m).sum()
    }

    pub fn reflect(&self) -> Self {
        self.pushforward(|a| -a.clone())
    }

    pub fn translate(&self, c: &Q) -> Self {
        self.pushforward(|a| a + c)
    }

    pub fn scale(&self, t: &Q) -> Self {
        self.pushforward(|a| a * t)
    }

    pub fn min_atom(&self) -> &Q {
        self.atoms.keys().next().expect("nonempty measure")
    }

    pub fn max_atom(&self) -> &Q {
        self.atoms.keys().next_back().expect("nonempty measure")
    }

    /// `mu((-inf, t])`.
    pub fn cdf(&self, t: &Q) -> Q {
        self.atoms.range(..=t.clone()).map(|(_, m)| m).sum()
    }

    /// Exact Wasserstein-1 distance on the line, `int |F - G| dt`.
    pub fn wasserstein1(&self, other: &Self) -> Q {
        let mut pts: Vec<&Q> = self.atoms.keys().chain(other.atoms.keys()).collect();
        pts.sort();
        pts.dedup();
        pts.windows(2)
            .map(|w| (self.cdf(w[0]) - other.cdf(w[0])).abs() * (w[1] - w[0]))
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
struct RawAtom {
    #[serde(with = "crate::rational::serde_point")]
    atom: Vec<Q>,
    #[serde(with = "crate::rational::serde_q")]
    mass: Q,
}

impl<A: Atom> Serialize for DiscreteMeasure<A> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<RawAtom> = self
            .atoms
            .iter()
            .map(|(a, m)| RawAtom { atom: a.to_point(), mass: m.clone() })
            .collect();
        #[derive(Serialize)]
        struct Wrapper {
            atoms: Vec<RawAtom>,
        }
        Wrapper { atoms: raw }.serialize(s)
    }
}

impl<'de, A: Atom> Deserialize<'de> for DiscreteMeasure<A> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wrapper {
            atoms: Vec<RawAtom>,
        }
        let w = Wrapper::deserialize(d)?;
        let atoms = w
            .atoms
            .into_iter()
            .map(|r| Ok((A::from_point(r.atom)?, r.mass)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        DiscreteMeasure::new(atoms).map_err(serde::de::Error::custom)
    }
}

/// Distribution on the line with an exact piecewise-polynomial CDF.
///
/// `breaks` is strictly increasing; `at_break[k]` is the (right-continuous)
/// CDF value at `breaks[k]`; `pieces[k]` is the CDF on the open interval
/// `(breaks[k], breaks[k + 1])`. Below the first break the CDF is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PLMeasure1D {
    breaks: Vec<Q>,
    at_break: Vec<Q>,
    pieces: Vec<UPoly>,
}

impl PLMeasure1D {
    pub fn new(breaks: Vec<Q>, at_break: Vec<Q>, pieces: Vec<UPoly>) -> Result<Self> {
        if breaks.is_empty() || at_break.len() != breaks.len() || pieces.len() + 1 != breaks.len() {
            return Err(Error::InvalidMeasure("inconsistent CDF layout".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMeasure("breakpoints not increasing".into()));
        }
        if !at_break.last().is_some_and(One::is_one) {
            return Err(Error::InvalidMeasure("CDF does not reach 1".into()));
        }
        let m = PLMeasure1D { breaks, at_break, pieces };
        for k in 0..m.breaks.len() {
            if m.left_limit(k) > m.at_break[k] || m.at_break[k].is_negative() {
                return Err(Error::InvalidMeasure("CDF decreases".into()));
            }
        }
        Ok(m)
    }

    pub fn dirac(t: Q) -> Self {
        PLMeasure1D { breaks: vec![t], at_break: vec![Q::one()], pieces: Vec::new() }
    }

    pub fn breaks(&self) -> &[Q] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[UPoly] {
        &self.pieces
    }

    pub fn support(&self) -> (&Q, &Q) {
        (&self.breaks[0], self.breaks.last().unwrap())
    }

    fn left_limit(&self, k: usize) -> Q {
        if k == 0 {
            Q::zero()
        } else {
            self.pieces[k - 1].eval(&self.breaks[k])
        }
    }

    pub fn cdf(&self, t: &Q) -> Q {
        if t < &self.breaks[0] {
            return Q::zero();
        }
        match self.breaks.binary_search(t) {
            Ok(k) => self.at_break[k].clone(),
            Err(k) if k == self.breaks.len() => Q::one(),
            Err(k) => self.pieces[k - 1].eval(t),
        }
    }

    /// Point masses `(t, mass)` where the CDF jumps.
    pub fn jumps(&self) -> Vec<(Q, Q)> {
        (0..self.breaks.len())
            .filter_map(|k| {
                let j = &self.at_break[k] - self.left_limit(k);
                (!j.is_zero()).then(|| (self.breaks[k].clone(), j))
            })
            .collect()
    }

    /// Mass of the continuous part on `(breaks[k], breaks[k+1])` must also
    /// match the change of the polynomial; this checks monotonicity on a
    /// dense rational grid of each interval.
    pub fn is_monotone(&self, samples_per_interval: u32) -> bool {
        let mut prev = Q::zero();
        for k in 0..self.breaks.len() {
            if self.left_limit(k) < prev || self.at_break[k] < self.left_limit(k) {
                return false;
            }
            prev = self.at_break[k].clone();
            if k + 1 < self.breaks.len() {
                let (a, b) = (&self.breaks[k], &self.breaks[k + 1]);
                for i in 1..samples_per_interval {
                    let t = a + (b - a) * Q::new(i.into(), samples_per_interval.into());
                    let v = self.pieces[k].eval(&t);
                    if v < prev {
                        return false;
                    }
                    prev = v;
                }
            }
        }
        true
    }

    /// `int |t|^p d sigma(t)`.
    pub fn abs_moment(&self, p: u32) -> Q {
        let weight = |t: &Q| pow_q(&t.abs(), p);
        let mut acc: Q = self.jumps().iter().map(|(t, m)| weight(t) * m).sum();
        let tp = {
            let mut c = vec![Q::zero(); p as usize + 1];
            c[p as usize] = Q::one();
            UPoly::new(c)
        };
        for (k, piece) in self.pieces.iter().enumerate() {
            let density = piece.derivative().mul(&tp);
            let (a, b) = (&self.breaks[k], &self.breaks[k + 1]);
            let zero = Q::zero();
            let segs: Vec<(Q, Q)> = if a < &zero && b > &zero {
                vec![(a.clone(), zero.clone()), (zero, b.clone())]
            } else {
                vec![(a.clone(), b.clone())]
            };
            for (s, e) in segs {
                let v = density.integrate(&s, &e);
                // t^p changes sign on the negative axis for odd p
                let neg = e <= Q::zero() && p % 2 == 1;
                acc += if neg { -v } else { v };
            }
        }
        acc
    }

    pub fn mean(&self) -> Q {
        let mut acc: Q = self.jumps().iter().map(|(t, m)| t * m).sum();
        let t = UPoly::new(vec![Q::zero(), Q::one()]);
        for (k, piece) in self.pieces.iter().enumerate() {
            acc += piece.derivative().mul(&t).integrate(&self.breaks[k], &self.breaks[k + 1]);
        }
        acc
    }

    /// Breakpoints plus `extra` uniformly spaced points over the support.
    pub fn default_grid(&self, extra: u32) -> Vec<Q> {
        let (a, b) = self.support();
        let mut ts: Vec<Q> = self.breaks.clone();
        if a < b && extra > 1 {
            for i in 0..extra {
                ts.push(a + (b - a) * Q::new(i.into(), (extra - 1).into()));
            }
        }
        ts.sort();
        ts.dedup();
        ts
    }

    /// CSV table with header `t,cdf` and exact rational cells.
    pub fn to_csv(&self, ts: &[Q]) -> String {
        let mut out = String::from("t,cdf\n");
        for t in ts {
            out.push_str(&format!("{},{}\n", fmt_q(t), fmt_q(&self.cdf(t))));
        }
        out
    }
}
