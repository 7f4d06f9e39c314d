//! Exact rational polyhedral geometry in dimension at most three.
//!
//! Polytopes keep both descriptions: the irredundant vertex list (sorted
//! lexicographically) and the facet inequalities `a . x <= b`. Facets and
//! vertices are found by exhaustive enumeration over point or constraint
//! subsets, which is exact and fast enough at the sizes used here.

mod hull;
mod pl;

pub use hull::{biconjugate_samples, upper_hull};
pub use pl::{AffinePiece, ConcavePLFunction, ConvexPLFunction};

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{determinant, nullspace, rank, solve, Matrix};
use crate::rational::{ceil_q, dot, floor_q, Q};

pub const MAX_DIM: usize = 3;

/// The halfspace `normal . x <= offset`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<Q>,
    pub offset: Q,
}

impl Halfspace {
    pub fn new(normal: Vec<Q>, offset: Q) -> Self {
        Halfspace { normal, offset }
    }

    /// `offset - normal . x`, nonnegative inside.
    pub fn slack(&self, x: &[Q]) -> Q {
        &self.offset - dot(&self.normal, x)
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        !self.slack(x).is_negative()
    }

    /// Scales so the first nonzero normal entry has absolute value one.
    pub fn normalized(&self) -> Self {
        match self.normal.iter().find(|a| !a.is_zero()) {
            Some(a) => {
                let s = a.abs();
                Halfspace {
                    normal: self.normal.iter().map(|x| x / &s).collect(),
                    offset: &self.offset / &s,
                }
            }
            None => self.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolytope {
    dim: usize,
    vertices: Vec<Vec<Q>>,
    facets: Vec<Halfspace>,
}

pub(crate) fn affine_rank(points: &[Vec<Q>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Matrix = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

fn k_subsets(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub(crate) fn for_each_subset(n: usize, k: usize, f: impl FnMut(&[usize])) {
    if k == 0 {
        return;
    }
    k_subsets(n, k, f)
}

impl RationalPolytope {
    /// Convex hull of the given points; rejects lower-dimensional input.
    pub fn from_vertices(points: Vec<Vec<Q>>) -> Result<Self> {
        let dim = points.first().map_or(0, |p| p.len());
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidInput(format!("polytope dimension {dim} not in 1..=3")));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
        let mut pts = points;
        pts.sort();
        pts.dedup();
        if affine_rank(&pts) < dim {
            return Err(Error::Degenerate("polytope is not full-dimensional".into()));
        }
        let mut facets: Vec<Halfspace> = Vec::new();
        for_each_subset(pts.len(), dim, |idx| {
            let base = &pts[idx[0]];
            let diffs: Matrix = idx[1..]
                .iter()
                .map(|&i| pts[i].iter().zip(base).map(|(a, b)| a - b).collect())
                .collect();
            if !diffs.is_empty() && rank(&diffs) < dim - 1 {
                return;
            }
            let ns = nullspace(&diffs, dim);
            if ns.len() != 1 {
                return;
            }
            let normal = ns.into_iter().next().unwrap();
            let offset = dot(&normal, base);
            let signs: Vec<Ordering> = pts.iter().map(|p| dot(&normal, p).cmp(&offset)).collect();
            let h = if signs.iter().all(|s| *s != Ordering::Greater) {
                Halfspace::new(normal, offset)
            } else if signs.iter().all(|s| *s != Ordering::Less) {
                Halfspace::new(normal.iter().map(|x| -x).collect(), -offset)
            } else {
                return;
            };
            let h = h.normalized();
            if !facets.contains(&h) {
                facets.push(h);
            }
        });
        facets.sort();
        let vertices = extreme_points(&pts, &facets, dim);
        Ok(RationalPolytope { dim, vertices, facets })
    }

    /// Bounded intersection of halfspaces; `None` when it is empty or not
    /// full-dimensional.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Option<Self> {
        let mut hs: Vec<Halfspace> = halfspaces
            .iter()
            .filter(|h| !h.normal.iter().all(Zero::is_zero) || h.offset.is_negative())
            .map(Halfspace::normalized)
            .collect();
        if hs.iter().any(|h| h.normal.iter().all(Zero::is_zero)) {
            return None;
        }
        hs.sort();
        hs.dedup();
        let mut verts: Vec<Vec<Q>> = Vec::new();
        for_each_subset(hs.len(), dim, |idx| {
            let a: Matrix = idx.iter().map(|&i| hs[i].normal.clone()).collect();
            let b: Vec<Q> = idx.iter().map(|&i| hs[i].offset.clone()).collect();
            if let Some(x) = solve(&a, &b) {
                if hs.iter().all(|h| h.contains(&x)) && !verts.contains(&x) {
                    verts.push(x);
                }
            }
        });
        verts.sort();
        if affine_rank(&verts) < dim {
            return None;
        }
        let mut facets: Vec<Halfspace> = hs
            .into_iter()
            .filter(|h| {
                let tight: Vec<Vec<Q>> = verts.iter().filter(|v| h.slack(v).is_zero()).cloned().collect();
                tight.len() >= dim && affine_rank(&tight) == dim - 1
            })
            .collect();
        facets.dedup();
        let vertices = extreme_points(&verts, &facets, dim);
        Some(RationalPolytope { dim, vertices, facets })
    }

    /// Axis-aligned box `[lo_i, hi_i]`.
    pub fn cuboid(lo: &[Q], hi: &[Q]) -> Result<Self> {
        let n = lo.len();
        let mut pts = vec![Vec::new()];
        for i in 0..n {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<Q>| {
                    [lo[i].clone(), hi[i].clone()].into_iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Self::from_vertices(pts)
    }

    pub fn unit_cube(n: usize) -> Self {
        let lo = vec![Q::zero(); n];
        let hi = vec![Q::one(); n];
        Self::cuboid(&lo, &hi).expect("unit cube")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<Q>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        self.facets.iter().all(|h| h.contains(x))
    }

    /// Intersection with extra halfspaces.
    pub fn cut(&self, extra: &[Halfspace]) -> Option<Self> {
        let mut hs = self.facets.clone();
        hs.extend_from_slice(extra);
        Self::from_halfspaces(self.dim, &hs)
    }

    pub fn min_linear(&self, xi: &[Q]) -> Q {
        self.vertices.iter().map(|v| dot(xi, v)).min().expect("nonempty")
    }

    pub fn max_linear(&self, xi: &[Q]) -> Q {
        self.vertices.iter().map(|v| dot(xi, v)).max().expect("nonempty")
    }

    /// Fan triangulation from the lexicographically smallest vertex.
    pub fn simplices(&self) -> Vec<Vec<Vec<Q>>> {
        let v0 = &self.vertices[0];
        match self.dim {
            1 => vec![vec![v0.clone(), self.vertices.last().unwrap().clone()]],
            2 => {
                let ring = angular_order(v0, &self.vertices[1..], |p| (p[0].clone(), p[1].clone()));
                ring.windows(2).map(|w| vec![v0.clone(), w[0].clone(), w[1].clone()]).collect()
            }
            3 => {
                let mut out = Vec::new();
                for f in &self.facets {
                    if f.slack(v0).is_zero() {
                        continue;
                    }
                    let fv: Vec<Vec<Q>> =
                        self.vertices.iter().filter(|v| f.slack(v).is_zero()).cloned().collect();
                    let drop = f.normal.iter().position(|a| !a.is_zero()).unwrap();
                    let keep: Vec<usize> = (0..3).filter(|&i| i != drop).collect();
                    let u0 = &fv[0];
                    let ring = angular_order(u0, &fv[1..], |p| (p[keep[0]].clone(), p[keep[1]].clone()));
                    for w in ring.windows(2) {
                        out.push(vec![v0.clone(), u0.clone(), w[0].clone(), w[1].clone()]);
                    }
                }
                out
            }
            _ => unreachable!("dimension bounded by construction"),
        }
    }

    pub fn volume(&self) -> Q {
        self.simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    pub fn barycenter(&self) -> Vec<Q> {
        let mut acc = vec![Q::zero(); self.dim];
        let mut total = Q::zero();
        for s in self.simplices() {
            let vol = simplex_volume(&s);
            let c = centroid(&s);
            for (a, x) in acc.iter_mut().zip(&c) {
                *a += &vol * x;
            }
            total += vol;
        }
        acc.iter().map(|a| a / &total).collect()
    }

    /// Integer points of the dilate `mP`, in lexicographic order.
    pub fn lattice_points(&self, m: u32) -> Vec<Vec<i64>> {
        let mq = Q::from_integer(m.into());
        let lo: Vec<i64> = (0..self.dim)
            .map(|i| {
                let x = self.vertices.iter().map(|v| &v[i] * &mq).min().unwrap();
                int_of(&ceil_q(&x))
            })
            .collect();
        let hi: Vec<i64> = (0..self.dim)
            .map(|i| {
                let x = self.vertices.iter().map(|v| &v[i] * &mq).max().unwrap();
                int_of(&floor_q(&x))
            })
            .collect();
        let scaled: Vec<Halfspace> = self
            .facets
            .iter()
            .map(|h| Halfspace::new(h.normal.clone(), &h.offset * &mq))
            .collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return out;
        }
        loop {
            let x: Vec<Q> = cur.iter().map(|&c| Q::from_integer(c.into())).collect();
            if scaled.iter().all(|h| h.contains(&x)) {
                out.push(cur.clone());
            }
            let mut i = self.dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < hi[i] {
                    cur[i] += 1;
                    cur[i + 1..].copy_from_slice(&lo[i + 1..]);
                    break;
                }
            }
        }
    }

    /// Whether every vertex lies in `(1/d) Z^n`.
    pub fn vertices_in_lattice(&self, d: u32) -> bool {
        let dq = Q::from_integer(d.into());
        self.vertices.iter().flatten().all(|x| (x * &dq).is_integer())
    }
}

fn int_of(x: &Q) -> i64 {
    use num_traits::ToPrimitive;
    x.to_integer().to_i64().expect("lattice bound fits in i64")
}

fn extreme_points(points: &[Vec<Q>], facets: &[Halfspace], dim: usize) -> Vec<Vec<Q>> {
    points
        .iter()
        .filter(|p| {
            let tight: Matrix = facets.iter().filter(|h| h.slack(p).is_zero()).map(|h| h.normal.clone()).collect();
            rank(&tight) == dim
        })
        .cloned()
        .collect()
}

/// Orders points counterclockwise (in the chosen 2D chart) around `apex`,
/// a vertex of their convex hull.
fn angular_order(apex: &[Q], others: &[Vec<Q>], chart: impl Fn(&[Q]) -> (Q, Q)) -> Vec<Vec<Q>> {
    let (ax, ay) = chart(apex);
    let mut pts: Vec<(Vec<Q>, Q, Q)> = others
        .iter()
        .map(|p| {
            let (x, y) = chart(p);
            (p.clone(), x - &ax, y - &ay)
        })
        .collect();
    pts.sort_by(|a, b| {
        let cross = &a.1 * &b.2 - &a.2 * &b.1;
        Q::zero().cmp(&cross)
    });
    pts.into_iter().map(|p| p.0).collect()
}

pub fn simplex_volume(s: &[Vec<Q>]) -> Q {
    let n = s.len() - 1;
    let m: Matrix = (1..=n).map(|j| s[j].iter().zip(&s[0]).map(|(a, b)| a - b).collect()).collect();
    let fact: Q = (1..=n as i64).map(|k| Q::from_integer(k.into())).product();
    determinant(&m).abs() / fact
}

pub fn centroid(points: &[Vec<Q>]) -> Vec<Q> {
    let k = Q::from_integer((points.len() as i64).into());
    let n = points[0].len();
    (0..n).map(|i| points.iter().map(|p| &p[i]).sum::<Q>() / &k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn simplex2() -> RationalPolytope {
        RationalPolytope::from_vertices(vec![qv(&[0, 0]), qv(&[1, 0]), qv(&[0, 1])]).unwrap()
    }

    #[test]
    fn volumes_and_barycenters() {
        let t = simplex2();
        assert_eq!(t.volume(), qr(1, 2));
        assert_eq!(t.barycenter(), vec![qr(1, 3), qr(1, 3)]);
        let sq = RationalPolytope::unit_cube(2);
        assert_eq!(sq.volume(), q(1));
        assert_eq!(sq.barycenter(), vec![qr(1, 2), qr(1, 2)]);
        let seg = RationalPolytope::from_vertices(vec![qv(&[0]), qv(&[1])]).unwrap();
        assert_eq!(seg.volume(), q(1));
        assert_eq!(seg.barycenter(), vec![qr(1, 2)]);
        let cube = RationalPolytope::unit_cube(3);
        assert_eq!(cube.volume(), q(1));
        assert_eq!(cube.barycenter(), vec![qr(1, 2); 3]);
        assert_eq!(cube.facets().len(), 6);
        let tet = RationalPolytope::from_vertices(vec![qv(&[0, 0, 0]), qv(&[1, 0, 0]), qv(&[0, 1, 0]), qv(&[0, 0, 1])])
            .unwrap();
        assert_eq!(tet.volume(), qr(1, 6));
        assert_eq!(tet.barycenter(), vec![qr(1, 4); 3]);
    }

    #[test]
    fn redundant_points_are_dropped() {
        let p = RationalPolytope::from_vertices(vec![
            qv(&[0, 0]),
            qv(&[2, 0]),
            qv(&[0, 2]),
            qv(&[2, 2]),
            qv(&[1, 1]),
            qv(&[1, 0]),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.volume(), q(4));
    }

    #[test]
    fn degenerate_rejected() {
        let e = RationalPolytope::from_vertices(vec![qv(&[0, 0]), qv(&[1, 1]), qv(&[2, 2])]);
        assert!(matches!(e, Err(Error::Degenerate(_))));
        let e = RationalPolytope::from_vertices(vec![qv(&[1])]);
        assert!(matches!(e, Err(Error::Degenerate(_))));
    }

    #[test]
    fn lattice_points_of_dilates() {
        let seg = RationalPolytope::from_vertices(vec![qv(&[0]), qv(&[1])]).unwrap();
        assert_eq!(seg.lattice_points(3), vec![vec![0], vec![1], vec![2], vec![3]]);
        assert_eq!(RationalPolytope::unit_cube(2).lattice_points(1).len(), 4);
        assert_eq!(simplex2().lattice_points(2).len(), 6);
        for m in 1..6u32 {
            let expect = ((m + 1) * (m + 2) / 2) as usize;
            assert_eq!(simplex2().lattice_points(m).len(), expect);
        }
        let half = RationalPolytope::from_vertices(vec![qv(&[0]), vec![qr(1, 2)]]).unwrap();
        assert_eq!(half.lattice_points(1), vec![vec![0]]);
    }

    #[test]
    fn halfspace_cut() {
        let sq = RationalPolytope::unit_cube(2);
        let cut = sq.cut(&[Halfspace::new(qv(&[1, 1]), q(1))]).unwrap();
        assert_eq!(cut.volume(), qr(1, 2));
        assert!(sq.cut(&[Halfspace::new(qv(&[1, 0]), q(-1))]).is_none());
        assert!(sq.cut(&[Halfspace::new(qv(&[1, 0]), q(0))]).is_none());
    }

    #[test]
    fn cell_volumes_sum_to_total() {
        let cube = RationalPolytope::unit_cube(3);
        let a = cube.cut(&[Halfspace::new(qv(&[1, 1, 1]), qr(3, 2))]).unwrap();
        let b = cube.cut(&[Halfspace::new(qv(&[-1, -1, -1]), qr(-3, 2))]).unwrap();
        assert_eq!(a.volume() + b.volume(), q(1));
        assert_eq!(a.volume(), qr(1, 2));
    }
}
