//! Seeded random instances for property checks and the acceptance suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fdnorm::FiniteDimNorm;
use crate::linalg::{determinant, Matrix};
use crate::polytope::{AffinePiece, RationalPolytope};
use crate::rational::{qv, Q};
use crate::toric::ToricHomNorm;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| <= num` and `1 <= q <= den`.
pub fn rational(rng: &mut Rng8, num: i64, den: i64) -> Q {
    Q::new(rng.random_range(-num..=num).into(), rng.random_range(1..=den).into())
}

pub fn vector(rng: &mut Rng8, n: usize, num: i64, den: i64) -> Vec<Q> {
    (0..n).map(|_| rational(rng, num, den)).collect()
}

/// Invertible integer basis with entries in `[-2, 2]`.
pub fn basis(rng: &mut Rng8, n: usize) -> Matrix {
    loop {
        let m: Matrix = (0..n).map(|_| (0..n).map(|_| Q::from_integer(rng.random_range(-2i64..=2).into())).collect()).collect();
        if determinant(&m) != Q::from_integer(0.into()) {
            return m;
        }
    }
}

/// A norm diagonalized by a random basis. Values repeat often so that
/// filtrations have nontrivial jumps.
pub fn fd_norm(rng: &mut Rng8, n: usize) -> FiniteDimNorm {
    let b = basis(rng, n);
    let values = (0..n).map(|_| rational(rng, 3, 2)).collect();
    FiniteDimNorm::new(b, values).expect("invertible basis")
}

/// Carriers used by randomized checks: segments, the unit square and a
/// lattice triangle.
pub fn carrier(rng: &mut Rng8, n: usize) -> RationalPolytope {
    match (n, rng.random_range(0..2)) {
        (1, 0) => RationalPolytope::unit_cube(1),
        (1, _) => RationalPolytope::from_vertices(vec![qv(&[-1]), qv(&[2])]).expect("segment"),
        (2, 0) => RationalPolytope::unit_cube(2),
        _ => RationalPolytope::from_vertices(vec![qv(&[0, 0]), qv(&[2, 0]), qv(&[0, 1])]).expect("triangle"),
    }
}

/// `min` of up to `max_pieces` random affine pieces, shifted so that its
/// minimum over the carrier is zero.
pub fn pl_norm(rng: &mut Rng8, carrier: &RationalPolytope, max_pieces: usize) -> ToricHomNorm {
    let k = rng.random_range(1..=max_pieces);
    let pieces = (0..k)
        .map(|_| AffinePiece::new(vector(rng, carrier.dim(), 3, 2), rational(rng, 2, 3)))
        .collect();
    let g = ToricHomNorm::divisorial(carrier.clone(), pieces).expect("nonempty pieces");
    let lo = g.as_pl().expect("PL").min_value();
    g.translate(&-lo).expect("PL translate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeding_is_deterministic() {
        let a: Vec<Q> = vector(&mut rng(7), 5, 9, 9);
        let b: Vec<Q> = vector(&mut rng(7), 5, 9, 9);
        assert_eq!(a, b);
        let g = pl_norm(&mut rng(3), &RationalPolytope::unit_cube(2), 4);
        assert_eq!(g.as_pl().unwrap().min_value(), Q::from_integer(0.into()));
    }
}
