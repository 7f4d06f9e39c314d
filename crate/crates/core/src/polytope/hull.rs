//! Upper convex hulls of lifted point sets, i.e. concave envelopes.

use num_traits::{Signed, Zero};

use super::{affine_rank, for_each_subset, AffinePiece, ConcavePLFunction, RationalPolytope};
use crate::error::{Error, Result};
use crate::linalg::{solve, Matrix};
use crate::rational::Q;

/// Affine functions supporting the upper hull of `{(x_i, y_i)}` along a
/// facet. Their minimum is the least concave majorant of the samples on
/// the convex hull of the `x_i`.
pub fn upper_hull(points: &[(Vec<Q>, Q)]) -> Result<Vec<AffinePiece>> {
    let n = points.first().map_or(0, |p| p.0.len());
    let xs: Vec<Vec<Q>> = points.iter().map(|p| p.0.clone()).collect();
    if n == 0 || affine_rank(&xs) < n {
        return Err(Error::Degenerate("sample points do not span the carrier".into()));
    }
    if n == 1 {
        return Ok(upper_chain(points));
    }
    let mut pieces: Vec<AffinePiece> = Vec::new();
    for_each_subset(points.len(), n + 1, |idx| {
        // slope . x + c = y on the chosen points
        let a: Matrix = idx
            .iter()
            .map(|&i| {
                let mut row = points[i].0.clone();
                row.push(Q::from_integer(1.into()));
                row
            })
            .collect();
        let b: Vec<Q> = idx.iter().map(|&i| points[i].1.clone()).collect();
        let Some(sol) = solve(&a, &b) else { return };
        let piece = AffinePiece::new(sol[..n].to_vec(), sol[n].clone());
        if points.iter().all(|(x, y)| !(piece.eval(x) - y).is_negative()) && !pieces.contains(&piece) {
            pieces.push(piece);
        }
    });
    Ok(pieces)
}

/// Monotone-chain upper hull on the line.
fn upper_chain(points: &[(Vec<Q>, Q)]) -> Vec<AffinePiece> {
    let mut pts: Vec<(Q, Q)> = points.iter().map(|(x, y)| (x[0].clone(), y.clone())).collect();
    pts.sort();
    // keep the highest sample per abscissa
    let mut uniq: Vec<(Q, Q)> = Vec::new();
    for p in pts {
        match uniq.last_mut() {
            Some(last) if last.0 == p.0 => *last = p,
            _ => uniq.push(p),
        }
    }
    let mut chain: Vec<(Q, Q)> = Vec::new();
    for p in uniq {
        while chain.len() >= 2 {
            let (a, b) = (&chain[chain.len() - 2], &chain[chain.len() - 1]);
            // drop b unless it lies strictly above segment a-p
            let cross = (&b.0 - &a.0) * (&p.1 - &a.1) - (&b.1 - &a.1) * (&p.0 - &a.0);
            if !cross.is_negative() {
                chain.pop();
            } else {
                break;
            }
        }
        chain.push(p);
    }
    chain
        .windows(2)
        .map(|w| {
            let slope = (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0);
            let c = &w[0].1 - &slope * &w[0].0;
            AffinePiece::new(vec![slope], c)
        })
        .collect()
}

/// Least concave majorant of finitely many samples, as a concave PL
/// function on `carrier`. Every vertex of the carrier must be sampled and
/// every sample must lie in the carrier.
pub fn biconjugate_samples(carrier: &RationalPolytope, samples: &[(Vec<Q>, Q)]) -> Result<ConcavePLFunction> {
    if let Some((x, _)) = samples.iter().find(|(x, _)| x.len() != carrier.dim()) {
        return Err(Error::DimensionMismatch { expected: carrier.dim(), found: x.len() });
    }
    if samples.iter().any(|(x, _)| !carrier.contains(x)) {
        return Err(Error::InvalidInput("sample outside the carrier".into()));
    }
    if carrier.vertices().iter().any(|v| !samples.iter().any(|(x, _)| x == v)) {
        return Err(Error::Degenerate("samples miss a vertex of the carrier".into()));
    }
    let pieces = upper_hull(samples)?;
    ConcavePLFunction::new(carrier.clone(), pieces)
}

/// Indices of points that are vertices of the upper hull.
pub(crate) fn upper_vertices(points: &[(Vec<Q>, Q)]) -> Result<Vec<usize>> {
    let n = points[0].0.len();
    let facets = upper_hull(points)?;
    let mut keep = Vec::new();
    for (k, (x, y)) in points.iter().enumerate() {
        let is_vertex = facets.iter().any(|f| {
            if !(f.eval(x) - y).is_zero() {
                return false;
            }
            let contact: Vec<Vec<Q>> =
                points.iter().filter(|(z, w)| (f.eval(z) - w).is_zero()).map(|p| p.0.clone()).collect();
            if n == 1 {
                let lo = contact.iter().min().unwrap();
                let hi = contact.iter().max().unwrap();
                return x == lo || x == hi;
            }
            RationalPolytope::from_vertices(contact).is_ok_and(|face| face.vertices().contains(x))
        });
        if is_vertex {
            keep.push(k);
        }
    }
    Ok(keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn seg() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![qv(&[0]), qv(&[1])]).unwrap()
    }

    #[test]
    fn tent_from_three_samples() {
        let s = vec![(qv(&[0]), q(0)), (vec![qr(1, 2)], q(1)), (qv(&[1]), q(0))];
        let g = biconjugate_samples(&seg(), &s).unwrap();
        let mut pieces = g.pieces().to_vec();
        pieces.sort();
        assert_eq!(
            pieces,
            vec![AffinePiece::new(qv(&[-2]), q(2)), AffinePiece::new(qv(&[2]), q(0))]
        );
    }

    #[test]
    fn interior_sample_below_chord() {
        let s = vec![(qv(&[0]), q(0)), (vec![qr(1, 2)], q(-1)), (qv(&[1]), q(0))];
        let g = biconjugate_samples(&seg(), &s).unwrap();
        assert_eq!(g.pieces(), &[AffinePiece::new(qv(&[0]), q(0))]);
    }

    #[test]
    fn missing_vertex_is_degenerate() {
        let s = vec![(qv(&[0]), q(0)), (vec![qr(1, 2)], q(1))];
        assert!(matches!(biconjugate_samples(&seg(), &s), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pyramid_in_two_dimensions() {
        let sq = RationalPolytope::unit_cube(2);
        let mut s: Vec<(Vec<Q>, Q)> = sq.vertices().iter().map(|v| (v.clone(), q(0))).collect();
        s.push((vec![qr(1, 2), qr(1, 2)], q(1)));
        s.push((vec![qr(1, 4), qr(1, 2)], qr(-5, 1)));
        let g = biconjugate_samples(&sq, &s).unwrap();
        assert_eq!(g.pieces().len(), 4);
        assert_eq!(g.evaluate(&[qr(1, 4), qr(1, 2)]), qr(1, 2));
        assert_eq!(g.integrate(), qr(1, 3));
    }
}
