//! Functions that are affine on each cell of a polyhedral decomposition:
//! exact `L^p` integrals, suprema and distribution functions.

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::measure::PLMeasure1D;
use crate::poly::UPoly;
use crate::polytope::{simplex_volume, AffinePiece, ConcavePLFunction, Halfspace, RationalPolytope};
use crate::rational::{binomial, Q};

/// An affine function on each cell; the cells cover `carrier` up to
/// measure zero.
#[derive(Clone, Debug)]
pub struct CellFunction {
    pub carrier_volume: Q,
    pub cells: Vec<(RationalPolytope, AffinePiece)>,
}

impl CellFunction {
    pub fn from_concave(g: &ConcavePLFunction) -> Self {
        CellFunction {
            carrier_volume: g.carrier().volume(),
            cells: g.active_cells().map(|(p, c)| (c.clone(), p.clone())).collect(),
        }
    }

    /// `g - h` on the common refinement of both subdivisions.
    pub fn difference(g: &ConcavePLFunction, h: &ConcavePLFunction) -> Result<Self> {
        if g.carrier() != h.carrier() {
            return Err(Error::CarrierMismatch);
        }
        let mut cells = Vec::new();
        for (pg, cg) in g.active_cells() {
            for (ph, ch) in h.active_cells() {
                if let Some(cell) = cg.cut(ch.facets()) {
                    let slope = pg.slope.iter().zip(&ph.slope).map(|(a, b)| a - b).collect();
                    cells.push((cell, AffinePiece::new(slope, &pg.constant - &ph.constant)));
                }
            }
        }
        Ok(CellFunction { carrier_volume: g.carrier().volume(), cells })
    }

    pub fn shifted(&self, c: &Q) -> Self {
        let mut out = self.clone();
        for (_, p) in &mut out.cells {
            p.constant += c;
        }
        out
    }

    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        for (_, p) in &mut out.cells {
            p.slope.iter_mut().for_each(|s| *s = -s.clone());
            p.constant = -p.constant.clone();
        }
        out
    }

    /// `int |f|^p d lambda_P` for integer `p >= 1`.
    pub fn abs_power_mean(&self, p: u32) -> Q {
        let mut acc = Q::zero();
        for (cell, piece) in &self.cells {
            if piece.slope.iter().all(Zero::is_zero) && piece.constant.is_zero() {
                continue;
            }
            let pos = cell.cut(&[Halfspace::new(piece.slope.iter().map(|s| -s.clone()).collect(), piece.constant.clone())]);
            let neg = cell.cut(&[Halfspace::new(piece.slope.clone(), -piece.constant.clone())]);
            if let Some(c) = pos {
                acc += power_integral(&c, piece, p);
            }
            if let Some(c) = neg {
                let flipped = AffinePiece::new(
                    piece.slope.iter().map(|s| -s.clone()).collect(),
                    -piece.constant.clone(),
                );
                acc += power_integral(&c, &flipped, p);
            }
        }
        acc / &self.carrier_volume
    }

    pub fn sup_abs(&self) -> Q {
        self.cells
            .iter()
            .flat_map(|(c, p)| c.vertices().iter().map(move |v| p.eval(v).abs()))
            .max()
            .unwrap_or_default()
    }

    /// Normalized measure of `{f <= t}`.
    pub fn sublevel_mass(&self, t: &Q) -> Q {
        let mut acc = Q::zero();
        for (cell, piece) in &self.cells {
            if piece.slope.iter().all(Zero::is_zero) {
                if piece.constant <= *t {
                    acc += cell.volume();
                }
                continue;
            }
            if let Some(c) = cell.cut(&[Halfspace::new(piece.slope.clone(), t - &piece.constant)]) {
                acc += c.volume();
            }
        }
        acc / &self.carrier_volume
    }

    /// Exact distribution of `f` under normalized Lebesgue measure: the CDF
    /// is a polynomial of degree at most `n` between consecutive values of
    /// `f` at cell vertices.
    pub fn distribution(&self) -> PLMeasure1D {
        let n = self.cells.first().map_or(1, |(c, _)| c.dim());
        let mut breaks: Vec<Q> = self
            .cells
            .iter()
            .flat_map(|(c, p)| c.vertices().iter().map(move |v| p.eval(v)))
            .collect();
        breaks.sort();
        breaks.dedup();
        let at_break: Vec<Q> = breaks.iter().map(|t| self.sublevel_mass(t)).collect();
        let pieces: Vec<UPoly> = breaks
            .windows(2)
            .map(|w| {
                let nodes: Vec<(Q, Q)> = (1..=n + 1)
                    .map(|i| {
                        let s = Q::new((i as i64).into(), ((n + 2) as i64).into());
                        let t = &w[0] + (&w[1] - &w[0]) * s;
                        let v = self.sublevel_mass(&t);
                        (t, v)
                    })
                    .collect();
                UPoly::interpolate(&nodes)
            })
            .collect();
        PLMeasure1D::new(breaks, at_break, pieces).expect("valid distribution")
    }
}

/// `int_cell l^p` for an affine `l >= 0` on the cell: on a simplex this is
/// `vol * n! p! / (n+p)! * h_p(l(v_0), ..., l(v_n))`.
fn power_integral(cell: &RationalPolytope, l: &AffinePiece, p: u32) -> Q {
    let n = cell.dim() as u64;
    let coef = Q::one() / binomial(n + p as u64, n);
    cell.simplices()
        .iter()
        .map(|s| {
            let vals: Vec<Q> = s.iter().map(|v| l.eval(v)).collect();
            simplex_volume(s) * complete_homogeneous(&vals, p) * &coef
        })
        .sum()
}

/// `h_p(x_0, ..., x_k)`, the sum of all monomials of degree `p`.
pub fn complete_homogeneous(xs: &[Q], p: u32) -> Q {
    let p = p as usize;
    let mut h = vec![Q::zero(); p + 1];
    h[0] = Q::one();
    for x in xs {
        for k in 1..=p {
            let t = &h[k - 1] * x;
            h[k] += t;
        }
    }
    h[p].clone()
}

/// Smallest `t` with `F(t) >= 1/2`. Exact when the defining equation has a
/// rational root; otherwise a rational within `1e-15` (relative to the
/// interval) and `exact = false`.
pub fn median(m: &PLMeasure1D) -> (Q, bool) {
    let half = Q::new(1.into(), 2.into());
    let breaks = m.breaks();
    for (k, b) in breaks.iter().enumerate() {
        if m.cdf(b) >= half {
            if k == 0 {
                return (b.clone(), true);
            }
            let piece = &m.pieces()[k - 1];
            if piece.eval(b) < half {
                return (b.clone(), true);
            }
            let (lo, hi) = (&breaks[k - 1], b);
            let eq = piece.add(&UPoly::constant(-half.clone()));
            return solve_increasing(&eq, lo, hi);
        }
    }
    unreachable!("CDF reaches one at the last break")
}

fn solve_increasing(p: &UPoly, lo: &Q, hi: &Q) -> (Q, bool) {
    let c = p.coeffs();
    match p.degree() {
        Some(1) => return (-&c[0] / &c[1], true),
        Some(2) => {
            let disc = &c[1] * &c[1] - Q::from_integer(4.into()) * &c[2] * &c[0];
            if let Some(r) = rational_sqrt(&disc) {
                let two_a = Q::from_integer(2.into()) * &c[2];
                for root in [(-&c[1] + &r) / &two_a, (-&c[1] - &r) / &two_a] {
                    if &root > lo && &root <= hi {
                        return (root, true);
                    }
                }
            }
        }
        _ => {}
    }
    // smallest root in (lo, hi]: bisection keeping p(a) < 0 <= p(b)
    let (mut a, mut b) = (lo.clone(), hi.clone());
    let tol = (hi - lo) * Q::new(1.into(), num_bigint::BigInt::from(10u64).pow(15));
    while &b - &a > tol {
        let mid = (&a + &b) / Q::from_integer(2.into());
        if p.eval(&mid).is_negative() {
            a = mid;
        } else {
            b = mid;
        }
    }
    (b, false)
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn seg() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![qv(&[0]), qv(&[1])]).unwrap()
    }

    #[test]
    fn power_integrals_on_segment() {
        let g = ConcavePLFunction::affine(seg(), AffinePiece::new(qv(&[2]), q(0))).unwrap();
        let f = CellFunction::from_concave(&g);
        assert_eq!(f.abs_power_mean(1), q(1));
        assert_eq!(f.abs_power_mean(2), qr(4, 3));
        assert_eq!(f.sup_abs(), q(2));
        // sign changes inside a cell
        let h = f.shifted(&q(-1));
        assert_eq!(h.abs_power_mean(1), qr(1, 2));
        assert_eq!(h.abs_power_mean(2), qr(1, 3));
    }

    #[test]
    fn distribution_of_linear_on_square() {
        let sq = RationalPolytope::unit_cube(2);
        let g = ConcavePLFunction::affine(sq, AffinePiece::new(qv(&[1, 1]), q(0))).unwrap();
        let d = CellFunction::from_concave(&g).distribution();
        assert_eq!(d.cdf(&qr(1, 2)), qr(1, 8));
        assert_eq!(d.cdf(&q(1)), qr(1, 2));
        assert_eq!(d.cdf(&qr(3, 2)), qr(7, 8));
        assert_eq!(d.mean(), q(1));
        assert_eq!(median(&d), (q(1), true));
    }

    #[test]
    fn irrational_median_is_flagged() {
        // sum of coordinates on the triangle: F(t) = t^2, median sqrt(1/2)
        let tri = RationalPolytope::from_vertices(vec![qv(&[0, 0]), qv(&[1, 0]), qv(&[0, 1])]).unwrap();
        let g = ConcavePLFunction::affine(tri, AffinePiece::new(qv(&[1, 1]), q(0))).unwrap();
        let d = CellFunction::from_concave(&g).distribution();
        let (m, exact) = median(&d);
        assert!(!exact);
        assert!((crate::rational::to_f64(&m) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn complete_homogeneous_small() {
        assert_eq!(complete_homogeneous(&qv(&[0, 2]), 2), q(4));
        assert_eq!(complete_homogeneous(&qv(&[1, 2, 3]), 2), q(25));
    }
}
