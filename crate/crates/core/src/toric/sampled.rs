//! Concave data known through samples on a rational grid.

use std::collections::BTreeMap;

use num_traits::Zero;
use super::pl1d::Pl1d;
use super::Enclosure;
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::polytope::RationalPolytope;
use crate::rational::Q;

/// Where sample values come from.
#[derive(Clone, Debug, PartialEq)]
pub enum SampleSource {
    /// A polynomial, which can be evaluated at any rational point.
    Polynomial(Poly),
    /// Values at every point of `P ∩ (1/pitch) Z^n`, keyed by `pitch * alpha`.
    Grid(BTreeMap<Vec<i64>, Q>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampledConcave {
    carrier: RationalPolytope,
    pitch: u32,
    source: SampleSource,
    samples: Vec<(Vec<Q>, Q)>,
}

impl SampledConcave {
    /// Checks that the carrier's vertices lie on the grid, that every grid
    /// point has a value, and that second differences along the directions
    /// `{-1,0,1}^n` are nonpositive.
    pub fn new(carrier: RationalPolytope, pitch: u32, source: SampleSource) -> Result<Self> {
        if pitch == 0 || !carrier.vertices_in_lattice(pitch) {
            return Err(Error::InvalidInput(format!("carrier vertices are not on the 1/{pitch} grid")));
        }
        let n = carrier.dim();
        let keys = carrier.lattice_points(pitch);
        let k = Q::from_integer(pitch.into());
        let mut table = BTreeMap::new();
        for key in &keys {
            let alpha: Vec<Q> = key.iter().map(|&c| Q::from_integer(c.into()) / &k).collect();
            let v = match &source {
                SampleSource::Polynomial(p) => {
                    if p.nvars() != n {
                        return Err(Error::DimensionMismatch { expected: n, found: p.nvars() });
                    }
                    p.eval(&alpha)
                }
                SampleSource::Grid(g) => g
                    .get(key)
                    .cloned()
                    .ok_or_else(|| Error::InvalidInput(format!("missing grid value at {key:?}")))?,
            };
            table.insert(key.clone(), v);
        }
        if let SampleSource::Grid(g) = &source {
            if g.len() != table.len() {
                return Err(Error::InvalidInput("grid has points outside the carrier".into()));
            }
        }
        for dir in directions(n) {
            for (key, v) in &table {
                let fwd: Vec<i64> = key.iter().zip(&dir).map(|(a, b)| a + b).collect();
                let bwd: Vec<i64> = key.iter().zip(&dir).map(|(a, b)| a - b).collect();
                if let (Some(a), Some(b)) = (table.get(&fwd), table.get(&bwd)) {
                    if a + b > v + v {
                        return Err(Error::InvalidInput(format!("samples are not concave at {key:?}")));
                    }
                }
            }
        }
        let samples = table
            .into_iter()
            .map(|(key, v)| (key.iter().map(|&c| Q::from_integer(c.into()) / &k).collect(), v))
            .collect();
        Ok(SampledConcave { carrier, pitch, source, samples })
    }

    pub fn carrier(&self) -> &RationalPolytope {
        &self.carrier
    }

    pub fn pitch(&self) -> u32 {
        self.pitch
    }

    pub fn source(&self) -> &SampleSource {
        &self.source
    }

    /// `(alpha, g(alpha))` over the grid, in lexicographic order.
    pub fn samples(&self) -> &[(Vec<Q>, Q)] {
        &self.samples
    }

    /// Exact value at `alpha` when known: anywhere for polynomial sources,
    /// on the grid otherwise.
    pub fn value_at(&self, alpha: &[Q]) -> Option<Q> {
        match &self.source {
            SampleSource::Polynomial(p) => Some(p.eval(alpha)),
            SampleSource::Grid(_) => self
                .samples
                .binary_search_by(|(a, _)| a.as_slice().cmp(alpha))
                .ok()
                .map(|i| self.samples[i].1.clone()),
        }
    }

    /// `int g d lambda_P`: exact for polynomial sources, chord and tangent
    /// bounds for grids in dimension one.
    pub fn mean(&self) -> Result<Enclosure> {
        let vol = self.carrier.volume();
        match &self.source {
            SampleSource::Polynomial(p) => {
                let total: Q = self.carrier.simplices().iter().map(|s| p.integrate_simplex(s)).sum();
                Ok(Enclosure::exact(total / vol))
            }
            SampleSource::Grid(_) => {
                let (lo, hi) = self.envelopes()?;
                Ok(Enclosure::new(lo.integrate_power(1) / &vol, hi.integrate_power(1) / &vol))
            }
        }
    }

    /// Lower and upper piecewise-linear bounds in dimension one.
    pub fn envelopes(&self) -> Result<(Pl1d, Pl1d)> {
        if self.carrier.dim() != 1 {
            return Err(Error::Unsupported("sampled enclosures are implemented in dimension 1".into()));
        }
        let pts: Vec<(Q, Q)> = self.samples.iter().map(|(a, v)| (a[0].clone(), v.clone())).collect();
        let hi = Pl1d::tangent_envelope(&pts)
            .ok_or_else(|| Error::InvalidInput("need at least three grid points".into()))?;
        Ok((Pl1d::chords(&pts), hi))
    }

    pub fn max_sample(&self) -> Q {
        self.samples.iter().map(|s| &s.1).max().expect("nonempty grid").clone()
    }

    pub fn map_values(&self, f: impl Fn(&Q) -> Q, poly: impl Fn(&Poly) -> Poly) -> Result<Self> {
        let source = match &self.source {
            SampleSource::Polynomial(p) => SampleSource::Polynomial(poly(p)),
            SampleSource::Grid(g) => SampleSource::Grid(g.iter().map(|(k, v)| (k.clone(), f(v))).collect()),
        };
        SampledConcave::new(self.carrier.clone(), self.pitch, source)
    }
}

/// Representatives of `{-1,0,1}^n \ {0}` up to sign.
fn directions(n: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        let v: Vec<i64> = (0..n)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                d
            })
            .collect();
        if let Some(first) = v.iter().find(|x| !x.is_zero()) {
            if *first > 0 {
                out.push(v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn parabola() -> Poly {
        // a(1 - a) = a - a^2
        Poly::from_terms(1, [(vec![1], q(1)), (vec![2], q(-1))])
    }

    #[test]
    fn polynomial_mean_is_exact() {
        let s = SampledConcave::new(RationalPolytope::unit_cube(1), 8, SampleSource::Polynomial(parabola())).unwrap();
        assert_eq!(s.mean().unwrap(), Enclosure::exact(qr(1, 6)));
        assert_eq!(s.value_at(&[qr(1, 3)]), Some(qr(2, 9)));
        assert_eq!(s.samples().len(), 9);
    }

    #[test]
    fn grid_mean_is_enclosed() {
        let grid: BTreeMap<Vec<i64>, Q> = (0..=8).map(|i| (vec![i], qr(i * (8 - i), 64))).collect();
        let s = SampledConcave::new(RationalPolytope::unit_cube(1), 8, SampleSource::Grid(grid)).unwrap();
        let e = s.mean().unwrap();
        assert!(e.lower < qr(1, 6) && qr(1, 6) < e.upper);
        assert_eq!(s.value_at(&qv(&[1])), Some(q(0)));
        assert_eq!(s.value_at(&[qr(1, 16)]), None);
    }

    #[test]
    fn rejects_convex_samples() {
        let grid: BTreeMap<Vec<i64>, Q> = (0..=2).map(|i| (vec![i], q((i - 1) * (i - 1)))).collect();
        assert!(SampledConcave::new(RationalPolytope::unit_cube(1), 2, SampleSource::Grid(grid)).is_err());
    }

    #[test]
    fn rejects_off_grid_carrier() {
        let p = RationalPolytope::from_vertices(vec![qv(&[0]), vec![qr(1, 3)]]).unwrap();
        assert!(SampledConcave::new(p, 2, SampleSource::Polynomial(parabola())).is_err());
    }

    #[test]
    fn direction_count() {
        assert_eq!(directions(1).len(), 1);
        assert_eq!(directions(2).len(), 4);
        assert_eq!(directions(3).len(), 13);
    }
}
