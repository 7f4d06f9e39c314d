//! Toric norms: homogeneous norms as concave functions on a polytope and
//! truncated norms as superadditive tables on its lattice points.

mod cells;
mod pl1d;
mod sampled;
mod truncated;

use num_traits::{Signed, Zero};
use serde::Serialize;

pub use cells::{complete_homogeneous, median, CellFunction};
pub use pl1d::{abs_bounds, Pl1d};
pub use sampled::{SampleSource, SampledConcave};
pub use truncated::TruncatedToricNorm;

use crate::error::{Error, Result};
use crate::fdnorm::FiniteDimNorm;
use crate::lp::{Distance, Exponent};
use crate::measure::{DiscreteMeasure, PLMeasure1D};
use crate::polytope::{biconjugate_samples, AffinePiece, ConcavePLFunction, RationalPolytope};
use crate::rational::{dot, Q};

/// A closed interval of rationals; exact when the endpoints agree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Enclosure {
    #[serde(with = "crate::rational::serde_q")]
    pub lower: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub upper: Q,
}

impl Enclosure {
    pub fn new(lower: Q, upper: Q) -> Self {
        debug_assert!(lower <= upper);
        Enclosure { lower, upper }
    }

    pub fn exact(v: Q) -> Self {
        Enclosure { lower: v.clone(), upper: v }
    }

    pub fn value(&self) -> Option<&Q> {
        (self.lower == self.upper).then_some(&self.lower)
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lower <= x && x <= &self.upper
    }

    pub fn width(&self) -> Q {
        &self.upper - &self.lower
    }
}

/// `d_p` between toric norms: bounds on `d_p^p` for integer `p`, or on
/// `d_inf` itself.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToricDistance {
    #[serde(serialize_with = "ser_exponent")]
    pub p: Exponent,
    pub powered: Enclosure,
}

fn ser_exponent<S: serde::Serializer>(p: &Exponent, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

impl ToricDistance {
    pub fn exact(&self) -> Option<Distance> {
        self.powered.value().map(|v| Distance::exact(self.p.clone(), v.clone()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpectralMeasure {
    /// Pushforward of normalized Lebesgue measure, exact CDF.
    Exact(PLMeasure1D),
    /// Uniform weights on the sampling grid.
    Empirical(DiscreteMeasure<Q>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteType {
    pub finite: bool,
    /// Pieces `(alpha_i, lambda_i)` of the Legendre transform.
    pub certificate: Vec<AffinePiece>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

/// `inf_c d_1(chi + c, chi')` with a minimizing shift. `exact` is false when
/// the median is irrational and `shift` is a rational approximation, in
/// which case `value` is the exact distance at that shift.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientD1 {
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub shift: Q,
    pub exact: bool,
}

/// Homogeneous toric norm, given by concave data on the carrier polytope.
#[derive(Clone, Debug, PartialEq)]
pub enum ToricHomNorm {
    Pl(ConcavePLFunction),
    Sampled(SampledConcave),
}

impl ToricHomNorm {
    /// `g(alpha) = <xi, alpha> - min_P <xi, .>`.
    pub fn from_valuation(carrier: RationalPolytope, xi: Vec<Q>) -> Result<Self> {
        let c = -carrier.min_linear(&xi);
        check_dim(carrier.dim(), xi.len())?;
        Ok(ToricHomNorm::Pl(ConcavePLFunction::affine(carrier, AffinePiece::new(xi, c))?))
    }

    pub fn divisorial(carrier: RationalPolytope, pieces: Vec<AffinePiece>) -> Result<Self> {
        Ok(ToricHomNorm::Pl(ConcavePLFunction::new(carrier, pieces)?))
    }

    pub fn trivial(carrier: RationalPolytope) -> Self {
        ToricHomNorm::Pl(ConcavePLFunction::constant(carrier, Q::zero()))
    }

    pub fn sampled(carrier: RationalPolytope, pitch: u32, source: SampleSource) -> Result<Self> {
        Ok(ToricHomNorm::Sampled(SampledConcave::new(carrier, pitch, source)?))
    }

    pub fn carrier(&self) -> &RationalPolytope {
        match self {
            ToricHomNorm::Pl(g) => g.carrier(),
            ToricHomNorm::Sampled(s) => s.carrier(),
        }
    }

    pub fn dim(&self) -> usize {
        self.carrier().dim()
    }

    pub fn as_pl(&self) -> Option<&ConcavePLFunction> {
        match self {
            ToricHomNorm::Pl(g) => Some(g),
            ToricHomNorm::Sampled(_) => None,
        }
    }

    pub fn require_pl(&self, op: &str) -> Result<&ConcavePLFunction> {
        self.as_pl().ok_or_else(|| Error::Unsupported(format!("{op} needs piecewise-linear data")))
    }

    /// Exact value of `g` at `alpha`, when available.
    pub fn value_at(&self, alpha: &[Q]) -> Option<Q> {
        match self {
            ToricHomNorm::Pl(g) => Some(g.evaluate(alpha)),
            ToricHomNorm::Sampled(s) => s.value_at(alpha),
        }
    }

    /// `vol(chi) = int g d lambda_P`.
    pub fn volume(&self) -> Result<Enclosure> {
        match self {
            ToricHomNorm::Pl(g) => Ok(Enclosure::exact(g.mean())),
            ToricHomNorm::Sampled(s) => s.mean(),
        }
    }

    /// `max_P g`; over the grid in sampled mode.
    pub fn lambda_max(&self) -> Q {
        match self {
            ToricHomNorm::Pl(g) => g.max_value(),
            ToricHomNorm::Sampled(s) => s.max_sample(),
        }
    }

    /// `||g - g'||_{L^p(lambda_P)}` for integer `p` or `p = inf`.
    pub fn distance(&self, other: &ToricHomNorm, p: &Exponent) -> Result<ToricDistance> {
        if self.carrier() != other.carrier() {
            return Err(Error::CarrierMismatch);
        }
        p.validate()?;
        let k = match p {
            Exponent::Infinity => None,
            Exponent::Finite(_) => Some(p.as_integer().ok_or_else(|| {
                Error::InvalidExponent(format!("toric distances need an integer exponent or inf, got {p}"))
            })?),
        };
        let done = |v: Q| Ok(ToricDistance { p: p.clone(), powered: Enclosure::exact(v) });
        if let (ToricHomNorm::Pl(g), ToricHomNorm::Pl(h)) = (self, other) {
            let f = CellFunction::difference(g, h)?;
            return done(k.map_or_else(|| f.sup_abs(), |k| f.abs_power_mean(k)));
        }
        if k == Some(1) {
            if let Some(v) = dominated_d1(self, other).or_else(|| dominated_d1(other, self)) {
                return done(v);
            }
        }
        let (l1, u1) = self.envelopes()?;
        let (l2, u2) = other.envelopes()?;
        let (lo, hi) = abs_bounds(&l1.sub(&u2), &u1.sub(&l2), k);
        let powered = match k {
            Some(_) => {
                let vol = self.carrier().volume();
                Enclosure::new(lo / &vol, hi / &vol)
            }
            None => Enclosure::new(lo, hi),
        };
        Ok(ToricDistance { p: p.clone(), powered })
    }

    fn envelopes(&self) -> Result<(Pl1d, Pl1d)> {
        match self {
            ToricHomNorm::Pl(g) => {
                if g.dim() != 1 {
                    return Err(Error::Unsupported(
                        "mixed sampled/PL distances are bounded in dimension 1 only".into(),
                    ));
                }
                let vs = g.subdivision_vertices();
                let f = Pl1d::new(vs.iter().map(|v| v[0].clone()).collect(), vs.iter().map(|v| g.evaluate(v)).collect());
                Ok((f.clone(), f))
            }
            ToricHomNorm::Sampled(s) => s.envelopes(),
        }
    }

    /// Distribution of `g` under `lambda_P`.
    pub fn spectral_measure(&self) -> Result<SpectralMeasure> {
        match self {
            ToricHomNorm::Pl(g) => {
                if g.dim() > 2 {
                    return Err(Error::Unsupported("exact spectral CDFs are limited to n <= 2".into()));
                }
                Ok(SpectralMeasure::Exact(CellFunction::from_concave(g).distribution()))
            }
            ToricHomNorm::Sampled(s) => Ok(SpectralMeasure::Empirical(DiscreteMeasure::from_weights(
                s.samples().iter().map(|(_, v)| (v.clone(), Q::from_integer(1.into()))),
            )?)),
        }
    }

    /// `sup_P (g - <xi, .>) + min_P <xi, .>`; the sup runs over the grid in
    /// sampled mode.
    pub fn fs_at(&self, xi: &[Q]) -> Result<Q> {
        check_dim(self.dim(), xi.len())?;
        let shift = self.carrier().min_linear(xi);
        let sup = match self {
            ToricHomNorm::Pl(g) => g.subdivision_vertices().iter().map(|v| g.evaluate(v) - dot(xi, v)).max(),
            ToricHomNorm::Sampled(s) => s.samples().iter().map(|(a, v)| v - dot(xi, a)).max(),
        };
        Ok(sup.expect("nonempty") + shift)
    }

    /// `(grad g)_* lambda_P`.
    pub fn monge_ampere(&self) -> Result<DiscreteMeasure<Vec<Q>>> {
        let g = self.require_pl("monge_ampere")?;
        let vol = g.carrier().volume();
        DiscreteMeasure::new(g.active_cells().map(|(p, c)| (p.slope.clone(), c.volume() / &vol)).collect())
    }

    /// Concave envelope of the samples `(beta/d, g(beta/d))`, `beta` in `dP ∩ Z^n`.
    pub fn canonical_approximant(&self, d: u32) -> Result<ToricHomNorm> {
        let carrier = self.carrier();
        if d == 0 || !carrier.vertices_in_lattice(d) {
            return Err(Error::InvalidInput(format!("carrier vertices are not in (1/{d}) Z^n")));
        }
        let dq = Q::from_integer(d.into());
        let samples = carrier
            .lattice_points(d)
            .into_iter()
            .map(|b| {
                let alpha: Vec<Q> = b.iter().map(|&x| Q::from_integer(x.into()) / &dq).collect();
                let v = self.value_at(&alpha).ok_or(Error::Untabulated(d))?;
                Ok((alpha, v))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ToricHomNorm::Pl(biconjugate_samples(carrier, &samples)?))
    }

    pub fn is_finite_type(&self) -> FiniteType {
        match self {
            ToricHomNorm::Pl(g) => {
                let certificate = g.legendre().pieces().to_vec();
                debug_assert!(certificate.iter().all(|p| g.carrier().contains(&p.slope)));
                FiniteType { finite: true, certificate, reason: None }
            }
            ToricHomNorm::Sampled(_) => {
                FiniteType { finite: false, certificate: Vec::new(), reason: Some("not PL".into()) }
            }
        }
    }

    /// `inf_c ||g - g' + c||_{L^1(lambda_P)}`, attained at the smallest
    /// median of `g' - g`.
    pub fn quotient_d1(&self, other: &ToricHomNorm) -> Result<QuotientD1> {
        let g = self.require_pl("quotient_d1")?;
        let h = other.require_pl("quotient_d1")?;
        if g.dim() > 2 {
            return Err(Error::Unsupported("quotient_d1 is limited to n <= 2".into()));
        }
        let diff = CellFunction::difference(g, h)?;
        let (shift, exact) = median(&diff.negated().distribution());
        let value = diff.shifted(&shift).abs_power_mean(1);
        debug_assert!(shift.abs() <= diff.abs_power_mean(1) * Q::from_integer(2.into()) || !exact);
        Ok(QuotientD1 { value, shift, exact })
    }

    /// Pointwise minimum `chi ∧ chi'`.
    pub fn min(&self, other: &ToricHomNorm) -> Result<ToricHomNorm> {
        Ok(ToricHomNorm::Pl(self.require_pl("min")?.min_with(other.require_pl("min")?)?))
    }

    pub fn translate(&self, c: &Q) -> Result<ToricHomNorm> {
        match self {
            ToricHomNorm::Pl(g) => Ok(ToricHomNorm::Pl(g.translate(c))),
            ToricHomNorm::Sampled(s) => Ok(ToricHomNorm::Sampled(
                s.map_values(|v| v + c, |p| p.add(&crate::poly::Poly::constant(p.nvars(), c.clone())))?,
            )),
        }
    }

    /// Multiplies by `t > 0`.
    pub fn scale(&self, t: &Q) -> Result<ToricHomNorm> {
        if !t.is_positive() {
            return Err(Error::InvalidInput("scaling factor must be positive".into()));
        }
        match self {
            ToricHomNorm::Pl(g) => Ok(ToricHomNorm::Pl(g.scale(t)?)),
            ToricHomNorm::Sampled(s) => Ok(ToricHomNorm::Sampled(s.map_values(|v| v * t, |p| p.scale(t))?)),
        }
    }

    /// The diagonal norm `beta -> m g(beta/m)` on the monomials of degree
    /// `m`, indexed by `carrier().lattice_points(m)`.
    pub fn restriction(&self, m: u32) -> Result<FiniteDimNorm> {
        let mq = Q::from_integer(m.into());
        let values = self
            .carrier()
            .lattice_points(m)
            .into_iter()
            .map(|b| {
                let alpha: Vec<Q> = b.iter().map(|&x| Q::from_integer(x.into()) / &mq).collect();
                self.value_at(&alpha).map(|v| v * &mq).ok_or(Error::Untabulated(m))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteDimNorm::diagonal(values))
    }
}

/// `d_1(a, b) = vol(a) - vol(b)` when `a` is sampled with exact volume,
/// `b` is PL and `a >= b` at every vertex of `b`'s subdivision (hence
/// everywhere, by concavity).
fn dominated_d1(a: &ToricHomNorm, b: &ToricHomNorm) -> Option<Q> {
    let (ToricHomNorm::Sampled(s), ToricHomNorm::Pl(g)) = (a, b) else {
        return None;
    };
    let mean = s.mean().ok()?.value()?.clone();
    g.subdivision_vertices()
        .iter()
        .all(|v| s.value_at(v).is_some_and(|x| x >= g.evaluate(v)))
        .then(|| mean - g.mean())
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
