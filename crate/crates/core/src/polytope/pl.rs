//! Piecewise-linear concave functions on polytopes and their Legendre
//! transforms.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::hull::upper_vertices;
use super::{affine_rank, Halfspace, RationalPolytope};
use crate::error::{Error, Result};
use crate::rational::{dot, Q};

/// `alpha -> <slope, alpha> + constant`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AffinePiece {
    #[serde(with = "crate::rational::serde_point")]
    pub slope: Vec<Q>,
    #[serde(rename = "const", with = "crate::rational::serde_q")]
    pub constant: Q,
}

impl AffinePiece {
    pub fn new(slope: Vec<Q>, constant: Q) -> Self {
        AffinePiece { slope, constant }
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        dot(&self.slope, x) + &self.constant
    }

    pub fn dim(&self) -> usize {
        self.slope.len()
    }

    /// `self <= other` as a halfspace in `alpha`.
    fn below(&self, other: &AffinePiece) -> Halfspace {
        Halfspace::new(
            self.slope.iter().zip(&other.slope).map(|(a, b)| a - b).collect(),
            &other.constant - &self.constant,
        )
    }
}

/// Bounded concave function `min_j { <xi_j, alpha> + c_j }` on a polytope.
///
/// Pieces that are not minimal on a full-dimensional cell are dropped at
/// construction, so the stored cells partition the carrier up to measure
/// zero and the pieces have pairwise distinct slopes.
#[derive(Clone, Debug)]
pub struct ConcavePLFunction {
    carrier: RationalPolytope,
    pieces: Vec<AffinePiece>,
    cells: Vec<RationalPolytope>,
}

impl ConcavePLFunction {
    pub fn new(carrier: RationalPolytope, pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyPieces);
        }
        if let Some(p) = pieces.iter().find(|p| p.dim() != carrier.dim()) {
            return Err(Error::DimensionMismatch { expected: carrier.dim(), found: p.dim() });
        }
        let mut uniq: Vec<AffinePiece> = Vec::new();
        for p in pieces {
            if !uniq.contains(&p) {
                uniq.push(p);
            }
        }
        let mut kept = Vec::new();
        let mut cells = Vec::new();
        for (j, pj) in uniq.iter().enumerate() {
            let constraints: Vec<Halfspace> = uniq
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, pk)| pj.below(pk))
                .collect();
            if let Some(cell) = carrier.cut(&constraints) {
                kept.push(pj.clone());
                cells.push(cell);
            }
        }
        debug_assert!(!kept.is_empty());
        Ok(ConcavePLFunction { carrier, pieces: kept, cells })
    }

    /// A single affine piece.
    pub fn affine(carrier: RationalPolytope, piece: AffinePiece) -> Result<Self> {
        Self::new(carrier, vec![piece])
    }

    pub fn constant(carrier: RationalPolytope, c: Q) -> Self {
        let n = carrier.dim();
        Self::new(carrier, vec![AffinePiece::new(vec![Q::zero(); n], c)]).expect("one piece")
    }

    pub fn carrier(&self) -> &RationalPolytope {
        &self.carrier
    }

    pub fn dim(&self) -> usize {
        self.carrier.dim()
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    /// Full-dimensional cells on which each piece attains the minimum.
    pub fn active_cells(&self) -> impl Iterator<Item = (&AffinePiece, &RationalPolytope)> {
        self.pieces.iter().zip(&self.cells)
    }

    pub fn evaluate(&self, alpha: &[Q]) -> Q {
        self.pieces.iter().map(|p| p.eval(alpha)).min().expect("nonempty")
    }

    /// Vertices of the cell subdivision, sorted and deduplicated.
    pub fn subdivision_vertices(&self) -> Vec<Vec<Q>> {
        let mut vs: Vec<Vec<Q>> = self.cells.iter().flat_map(|c| c.vertices().iter().cloned()).collect();
        vs.sort();
        vs.dedup();
        vs
    }

    pub fn max_value(&self) -> Q {
        self.subdivision_vertices().iter().map(|v| self.evaluate(v)).max().expect("nonempty")
    }

    pub fn min_value(&self) -> Q {
        self.carrier.vertices().iter().map(|v| self.evaluate(v)).min().expect("nonempty")
    }

    /// Exact Lebesgue integral over the carrier: on each cell the piece is
    /// affine, so its integral is the cell volume times its centroid value.
    pub fn integrate(&self) -> Q {
        self.active_cells().map(|(p, c)| c.volume() * p.eval(&c.barycenter())).sum()
    }

    /// Integral against the carrier's normalized Lebesgue measure.
    pub fn mean(&self) -> Q {
        self.integrate() / self.carrier.volume()
    }

    /// Legendre transform `sup_alpha { <alpha, xi> + g(alpha) }`, as the
    /// maximum of `<v, xi> + g(v)` over subdivision vertices `v`.
    pub fn legendre(&self) -> ConvexPLFunction {
        let pieces = self
            .subdivision_vertices()
            .into_iter()
            .map(|v| {
                let c = self.evaluate(&v);
                AffinePiece::new(v, c)
            })
            .collect();
        ConvexPLFunction::new(pieces).expect("subdivision vertices span the carrier")
    }

    /// Pointwise minimum, still concave.
    pub fn min_with(&self, other: &ConcavePLFunction) -> Result<ConcavePLFunction> {
        if self.carrier != other.carrier {
            return Err(Error::CarrierMismatch);
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        ConcavePLFunction::new(self.carrier.clone(), pieces)
    }

    pub fn translate(&self, c: &Q) -> ConcavePLFunction {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.constant += c;
        }
        out
    }

    /// Multiplies by `t > 0`.
    pub fn scale(&self, t: &Q) -> Result<ConcavePLFunction> {
        if t <= &Q::zero() {
            return Err(Error::InvalidInput("scaling factor must be positive".into()));
        }
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.slope.iter_mut().for_each(|s| *s *= t);
            p.constant *= t;
        }
        Ok(out)
    }

    /// Adds a linear function, `g + <xi, .>`.
    pub fn add_linear(&self, xi: &[Q]) -> ConcavePLFunction {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.slope.iter_mut().zip(xi).for_each(|(s, x)| *s += x);
        }
        out
    }

    /// Pieces in sorted order, the canonical form used for equality.
    pub fn sorted_pieces(&self) -> Vec<AffinePiece> {
        let mut p = self.pieces.clone();
        p.sort();
        p
    }
}

impl PartialEq for ConcavePLFunction {
    fn eq(&self, other: &Self) -> bool {
        self.carrier == other.carrier && self.sorted_pieces() == other.sorted_pieces()
    }
}

impl Eq for ConcavePLFunction {}

/// Convex function `max_i { <alpha_i, xi> + lambda_i }` on all of `Q^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvexPLFunction {
    pieces: Vec<AffinePiece>,
}

impl ConvexPLFunction {
    /// Drops pieces that never attain the maximum on an open set; pieces are
    /// stored by slope, lexicographically decreasing.
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::EmptyPieces);
        }
        let n = pieces[0].dim();
        if let Some(p) = pieces.iter().find(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
        }
        let mut sorted = pieces;
        sorted.sort_by(|a, b| b.cmp(a));
        // equal slopes: keep the largest constant (first after the sort)
        sorted.dedup_by(|later, first| later.slope == first.slope);
        let slopes: Vec<Vec<Q>> = sorted.iter().map(|p| p.slope.clone()).collect();
        if sorted.len() > 1 && affine_rank(&slopes) == n {
            let lifted: Vec<(Vec<Q>, Q)> = sorted.iter().map(|p| (p.slope.clone(), p.constant.clone())).collect();
            let keep = upper_vertices(&lifted)?;
            sorted = keep.into_iter().map(|i| sorted[i].clone()).collect();
        }
        Ok(ConvexPLFunction { pieces: sorted })
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn evaluate(&self, xi: &[Q]) -> Q {
        self.pieces.iter().map(|p| p.eval(xi)).max().expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn seg() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![qv(&[0]), qv(&[1])]).unwrap()
    }

    fn min_alpha_third() -> ConcavePLFunction {
        ConcavePLFunction::new(
            seg(),
            vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[0]), qr(1, 3))],
        )
        .unwrap()
    }

    #[test]
    fn active_cells_of_min_alpha_third() {
        let g = min_alpha_third();
        let cells: Vec<(AffinePiece, Vec<Vec<Q>>)> =
            g.active_cells().map(|(p, c)| (p.clone(), c.vertices().to_vec())).collect();
        assert_eq!(
            cells,
            vec![
                (AffinePiece::new(qv(&[1]), q(0)), vec![qv(&[0]), vec![qr(1, 3)]]),
                (AffinePiece::new(qv(&[0]), qr(1, 3)), vec![vec![qr(1, 3)], qv(&[1])]),
            ]
        );
    }

    #[test]
    fn tent_cells() {
        let g = ConcavePLFunction::new(
            seg(),
            vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[-1]), q(1))],
        )
        .unwrap();
        let cells: Vec<Vec<Vec<Q>>> = g.active_cells().map(|(_, c)| c.vertices().to_vec()).collect();
        assert_eq!(cells, vec![vec![qv(&[0]), vec![qr(1, 2)]], vec![vec![qr(1, 2)], qv(&[1])]]);
    }

    #[test]
    fn single_piece_cell_is_carrier() {
        let g = ConcavePLFunction::affine(seg(), AffinePiece::new(qv(&[2]), q(0))).unwrap();
        let cells: Vec<_> = g.active_cells().collect();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].1, &seg());
    }

    #[test]
    fn dominated_piece_dropped() {
        let g = ConcavePLFunction::new(
            seg(),
            vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[1]), q(5))],
        )
        .unwrap();
        assert_eq!(g.pieces().len(), 1);
        assert!(matches!(ConcavePLFunction::new(seg(), vec![]), Err(Error::EmptyPieces)));
    }

    #[test]
    fn integrals() {
        assert_eq!(min_alpha_third().integrate(), qr(5, 18));
        let c = ConcavePLFunction::constant(RationalPolytope::unit_cube(2), qr(3, 4));
        assert_eq!(c.integrate(), qr(3, 4));
    }

    #[test]
    fn legendre_closed_form() {
        let gv = min_alpha_third().legendre();
        assert_eq!(
            gv.pieces(),
            &[
                AffinePiece::new(qv(&[1]), qr(1, 3)),
                AffinePiece::new(vec![qr(1, 3)], qr(1, 3)),
                AffinePiece::new(qv(&[0]), q(0)),
            ]
        );
    }

    #[test]
    fn legendre_of_zero_is_support_function() {
        let sq = RationalPolytope::unit_cube(2);
        let z = ConcavePLFunction::constant(sq.clone(), q(0)).legendre();
        for xi in [qv(&[1, -2]), qv(&[3, 5]), qv(&[-1, -1])] {
            assert_eq!(z.evaluate(&xi), sq.max_linear(&xi));
        }
        assert_eq!(z.pieces().len(), 4);
    }

    #[test]
    fn legendre_of_linear_shifts_support() {
        let sq = RationalPolytope::unit_cube(2);
        let xi0 = qv(&[2, -1]);
        let g = ConcavePLFunction::affine(sq.clone(), AffinePiece::new(xi0.clone(), q(0))).unwrap();
        let gv = g.legendre();
        for xi in [qv(&[1, -2]), qv(&[-3, 5]), vec![qr(1, 2), qr(-7, 3)]] {
            let shifted: Vec<Q> = xi.iter().zip(&xi0).map(|(a, b)| a + b).collect();
            assert_eq!(gv.evaluate(&xi), sq.max_linear(&shifted));
        }
    }

    #[test]
    fn convex_pruning() {
        // middle piece never attains the max
        let f = ConvexPLFunction::new(vec![
            AffinePiece::new(qv(&[0]), q(0)),
            AffinePiece::new(vec![qr(1, 2)], q(-1)),
            AffinePiece::new(qv(&[1]), q(0)),
        ])
        .unwrap();
        assert_eq!(f.pieces().len(), 2);
    }
}
