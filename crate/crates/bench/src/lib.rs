//! Benchmark fixtures. Everything is seeded so runs are comparable.

use filtra::energy::OTOptions;
use filtra::rational::{qr, qv};
use filtra::sampling;
use filtra::toric::ToricHomNorm;
use filtra::{DiscreteMeasure, FiniteDimNorm, Q, RationalPolytope};

pub const SEED: u64 = 0xf17a;

/// A pair of random norms on a space of dimension `n`.
pub fn fd_pair(n: usize) -> (FiniteDimNorm, FiniteDimNorm) {
    let mut rng = sampling::rng(SEED);
    (sampling::fd_norm(&mut rng, n), sampling::fd_norm(&mut rng, n))
}

/// Two random PL norms on the unit square.
pub fn square_pair(pieces: usize) -> (ToricHomNorm, ToricHomNorm) {
    let mut rng = sampling::rng(SEED);
    let p = RationalPolytope::unit_cube(2);
    (sampling::pl_norm(&mut rng, &p, pieces), sampling::pl_norm(&mut rng, &p, pieces))
}

pub fn parabola() -> ToricHomNorm {
    filtra::selftest::parabola_norm()
}

/// Uniform measure on four interior atoms of the unit square.
pub fn four_atoms() -> (RationalPolytope, DiscreteMeasure<Vec<Q>>) {
    let atoms = [[1, 1], [-1, 2], [2, -1], [0, 0]];
    let mu = DiscreteMeasure::new(atoms.iter().map(|a| (qv(a), qr(1, 4))).collect()).expect("probability");
    (RationalPolytope::unit_cube(2), mu)
}

pub fn ot_options() -> OTOptions {
    OTOptions::default()
}
