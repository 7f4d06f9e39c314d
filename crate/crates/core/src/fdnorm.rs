//! Non-Archimedean norms on finite-dimensional rational vector spaces.
//!
//! A norm is stored as a diagonalizing basis together with the value of
//! each basis vector. Evaluation uses the min rule: if `v = sum a_i b_i`
//! then `chi(v) = min { lambda_i : a_i != 0 }`, and `chi(0) = +inf`.
//!
//! Two norms always admit a joint orthogonal basis; it is built from the
//! bigraded pieces `F^lambda ∩ G^mu` of the two filtrations, and every
//! metric quantity (relative spectrum, `d_p`, minimum) is read off it.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, transpose, Matrix, Subspace};
use crate::lp::{Distance, Exponent};
use crate::measure::DiscreteMeasure;
use crate::poly::Poly;
use crate::rational::{ExtQ, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDimNorm {
    dim: usize,
    /// Basis vectors as columns; `None` is the standard basis.
    columns: Option<Matrix>,
    /// Row-major inverse of the column matrix.
    coords: Option<Matrix>,
    values: Vec<Q>,
}

/// Relative spectrum, sorted non-increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeSpectrum(Vec<Q>);

impl RelativeSpectrum {
    pub fn values(&self) -> &[Q] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Joint orthogonal basis with the values of both norms on each vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JointBasis {
    pub columns: Matrix,
    pub first: Vec<Q>,
    pub second: Vec<Q>,
}

impl FiniteDimNorm {
    /// Norm diagonal in the basis `columns` with the given values.
    pub fn new(columns: Matrix, values: Vec<Q>) -> Result<Self> {
        let dim = values.len();
        if dim == 0 {
            return Err(Error::InvalidInput("zero-dimensional norm".into()));
        }
        if columns.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: columns.len() });
        }
        if let Some(c) = columns.iter().find(|c| c.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
        }
        let coords = inverse(&transpose(&columns)).ok_or(Error::SingularBasis)?;
        Ok(FiniteDimNorm { dim, columns: Some(columns), coords: Some(coords), values })
    }

    /// Norm diagonal in the standard basis.
    pub fn diagonal(values: Vec<Q>) -> Self {
        assert!(!values.is_empty(), "zero-dimensional norm");
        FiniteDimNorm { dim: values.len(), columns: None, coords: None, values }
    }

    pub fn trivial(dim: usize) -> Self {
        Self::diagonal(vec![Q::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn column(&self, i: usize) -> Vec<Q> {
        match &self.columns {
            Some(c) => c[i].clone(),
            None => unit(self.dim, i),
        }
    }

    pub fn columns(&self) -> Matrix {
        (0..self.dim).map(|i| self.column(i)).collect()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: n });
        }
        Ok(())
    }

    fn coordinates(&self, v: &[Q]) -> Vec<Q> {
        match &self.coords {
            Some(m) => mat_vec(m, v),
            None => v.to_vec(),
        }
    }

    pub fn evaluate(&self, v: &[Q]) -> Result<ExtQ> {
        self.check_dim(v.len())?;
        Ok(self
            .coordinates(v)
            .iter()
            .zip(&self.values)
            .filter(|(a, _)| !a.is_zero())
            .map(|(_, l)| l)
            .min()
            .map_or(ExtQ::PosInf, |l| ExtQ::Finite(l.clone())))
    }

    /// Distinct values, largest first.
    pub fn jumps(&self) -> Vec<Q> {
        let mut j = self.values.clone();
        j.sort_by(|a, b| b.cmp(a));
        j.dedup();
        j
    }

    /// `F^lambda = { v : chi(v) >= lambda }`.
    pub fn filtration(&self, lambda: &Q) -> Subspace {
        let cols: Matrix = (0..self.dim)
            .filter(|&i| &self.values[i] >= lambda)
            .map(|i| self.column(i))
            .collect();
        Subspace::span(self.dim, &cols)
    }

    /// Dimension-count certificate: `basis` is orthogonal for `self` iff for
    /// every jump `lambda`, `#{i : chi(b_i) >= lambda} = dim F^lambda`.
    pub fn is_orthogonal_basis(&self, basis: &Matrix) -> Result<bool> {
        self.check_dim(basis.len())?;
        if crate::linalg::rank(basis) != self.dim {
            return Ok(false);
        }
        let vals: Vec<Q> = basis
            .iter()
            .map(|b| self.evaluate(b).map(|e| e.finite().cloned().expect("nonzero basis vector")))
            .collect::<Result<_>>()?;
        for lambda in self.jumps() {
            let count = vals.iter().filter(|v| **v >= lambda).count();
            if count != self.filtration(&lambda).dim() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn volume(&self) -> Q {
        self.values.iter().sum::<Q>() / Q::from_integer((self.dim as i64).into())
    }

    /// `(lambda_min, lambda_max)`.
    pub fn lambda_extremes(&self) -> (Q, Q) {
        let min = self.values.iter().min().cloned().expect("nonempty");
        let max = self.values.iter().max().cloned().expect("nonempty");
        (min, max)
    }

    pub fn translate(&self, c: &Q) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v += c);
        out
    }

    /// Scales values by `t > 0`.
    pub fn scale(&self, t: &Q) -> Result<Self> {
        if t <= &Q::zero() {
            return Err(Error::InvalidInput("scaling factor must be positive".into()));
        }
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= t);
        Ok(out)
    }

    /// Replaces the values, keeping the basis.
    fn with_values(&self, values: Vec<Q>) -> Self {
        FiniteDimNorm { values, ..self.clone() }
    }

    /// Joint orthogonal basis of two norms.
    ///
    /// Jump pairs `(lambda, mu)` are visited in lexicographically decreasing
    /// order; at each pair the basis of `F^lambda ∩ G^mu` is completed over
    /// `(F^{>lambda} ∩ G^mu) + (F^lambda ∩ G^{>mu})`. Cubic cost per pair,
    /// intended for dimensions up to about 64.
    pub fn joint_basis(&self, other: &FiniteDimNorm) -> Result<JointBasis> {
        self.check_dim(other.dim)?;
        let same_basis = match (&self.columns, &other.columns) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b,
            _ => false,
        };
        if same_basis || other.jumps().len() == 1 {
            return Ok(JointBasis {
                columns: self.columns(),
                first: self.values.clone(),
                second: self.columns().iter().map(|b| other.eval_finite(b)).collect(),
            });
        }
        if self.jumps().len() == 1 {
            return Ok(JointBasis {
                columns: other.columns(),
                first: other.columns().iter().map(|b| self.eval_finite(b)).collect(),
                second: other.values.clone(),
            });
        }

        let lambdas = self.jumps();
        let mus = other.jumps();
        let fs: Vec<Subspace> = lambdas.iter().map(|l| self.filtration(l)).collect();
        let gs: Vec<Subspace> = mus.iter().map(|m| other.filtration(m)).collect();
        let zero = Subspace::zero(self.dim);
        let mut cap: Vec<Vec<Subspace>> = Vec::with_capacity(fs.len());
        for f in &fs {
            cap.push(gs.iter().map(|g| f.intersect(g)).collect());
        }
        let get = |k: Option<usize>, l: Option<usize>| -> &Subspace {
            match (k, l) {
                (Some(k), Some(l)) => &cap[k][l],
                _ => &zero,
            }
        };

        let mut out = JointBasis { columns: Vec::new(), first: Vec::new(), second: Vec::new() };
        for k in 0..lambdas.len() {
            for l in 0..mus.len() {
                let piece = get(Some(k), Some(l));
                if piece.dim() == 0 {
                    continue;
                }
                let lower = get(k.checked_sub(1), Some(l)).sum(get(Some(k), l.checked_sub(1)));
                for v in piece.complement_over(&lower) {
                    out.columns.push(v);
                    out.first.push(lambdas[k].clone());
                    out.second.push(mus[l].clone());
                }
            }
        }
        debug_assert_eq!(out.columns.len(), self.dim);
        debug_assert!(self.is_orthogonal_basis(&out.columns).unwrap_or(false));
        debug_assert!(other.is_orthogonal_basis(&out.columns).unwrap_or(false));
        Ok(out)
    }

    fn eval_finite(&self, v: &[Q]) -> Q {
        self.evaluate(v)
            .expect("dimension checked")
            .finite()
            .cloned()
            .expect("basis vectors are nonzero")
    }

    pub fn relative_spectrum(&self, other: &FiniteDimNorm) -> Result<RelativeSpectrum> {
        let jb = self.joint_basis(other)?;
        let mut s: Vec<Q> = jb.first.iter().zip(&jb.second).map(|(a, b)| a - b).collect();
        s.sort_by(|a, b| b.cmp(a));
        Ok(RelativeSpectrum(s))
    }

    /// `d_p(chi, chi') = (N^{-1} sum |lambda_i|^p)^{1/p}` over the relative
    /// spectrum; `p = inf` is the Goldman–Iwahori distance `max |lambda_i|`.
    pub fn distance(&self, other: &FiniteDimNorm, p: &Exponent) -> Result<Distance> {
        p.validate()?;
        let spec = self.relative_spectrum(other)?;
        Distance::from_deviations(p, spec.values())
    }

    /// Pointwise minimum `chi ∧ chi'`.
    pub fn min(&self, other: &FiniteDimNorm) -> Result<FiniteDimNorm> {
        let jb = self.joint_basis(other)?;
        let values = jb.first.iter().zip(&jb.second).map(|(a, b)| a.min(b).clone()).collect();
        if self.columns == other.columns {
            return Ok(self.with_values(values));
        }
        FiniteDimNorm::new(jb.columns, values)
    }

    /// Finite-level spectral measure `N^{-1} sum delta_{lambda_i(chi, chi')}`.
    pub fn spectral_measure(&self, other: &FiniteDimNorm) -> Result<DiscreteMeasure<Q>> {
        let spec = self.relative_spectrum(other)?;
        DiscreteMeasure::from_weights(spec.0.into_iter().map(|l| (l, Q::one())))
    }

    /// Gram–Schmidt retraction onto the apartment of the basis `e`: the
    /// value at `e_i` is the largest `lambda` with
    /// `e_i ∈ F^lambda + span(e_1, ..., e_{i-1})`.
    pub fn gram_schmidt_retract(&self, e: &Matrix) -> Result<FiniteDimNorm> {
        self.check_dim(e.len())?;
        let jumps = self.jumps();
        let fs: Vec<Subspace> = jumps.iter().map(|l| self.filtration(l)).collect();
        let mut values = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            self.check_dim(e[i].len())?;
            let prev = Subspace::span(self.dim, &e[..i]);
            let k = fs
                .iter()
                .position(|f| f.sum(&prev).contains(&e[i]))
                .expect("the lowest filtration step is the whole space");
            values.push(jumps[k].clone());
        }
        FiniteDimNorm::new(e.clone(), values)
    }

    /// Induced norm on the `m`-th symmetric power, diagonal in the monomial
    /// basis of the diagonalizing basis (exponents in lexicographically
    /// decreasing order) with additive values.
    pub fn symmetric_power(&self, m: u32) -> Result<FiniteDimNorm> {
        if m < 1 {
            return Err(Error::InvalidInput("symmetric power degree must be at least 1".into()));
        }
        let exps = monomials(self.dim, m);
        let values: Vec<Q> = exps
            .iter()
            .map(|a| a.iter().zip(&self.values).map(|(&k, l)| l * Q::from_integer(k.into())).sum())
            .collect();
        let Some(cols) = &self.columns else {
            return Ok(FiniteDimNorm::diagonal(values));
        };
        let index: BTreeMap<&Vec<u32>, usize> = exps.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let linear: Vec<Poly> = cols.iter().map(|c| Poly::affine(Q::zero(), c)).collect();
        let columns: Matrix = exps
            .iter()
            .map(|a| {
                let mut p = Poly::constant(self.dim, Q::one());
                for (i, &k) in a.iter().enumerate() {
                    for _ in 0..k {
                        p = p.mul(&linear[i]);
                    }
                }
                let mut col = vec![Q::zero(); exps.len()];
                for (e, c) in p.terms() {
                    col[index[e]] = c.clone();
                }
                col
            })
            .collect();
        FiniteDimNorm::new(columns, values)
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// Exponent vectors of total degree `m` in `n` variables, lexicographically
/// decreasing.
pub fn monomials(n: usize, m: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(m);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=m).rev() {
            prefix.push(k);
            rec(n, m - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    fn chi20() -> FiniteDimNorm {
        FiniteDimNorm::diagonal(qv(&[2, 0]))
    }

    /// F'^1 = span(e1 + e2), values (1, 0).
    fn tilted() -> FiniteDimNorm {
        FiniteDimNorm::new(vec![qv(&[1, 1]), qv(&[0, 1])], qv(&[1, 0])).unwrap()
    }

    #[test]
    fn evaluation_min_rule() {
        let n = chi20();
        assert_eq!(n.evaluate(&qv(&[1, 1])).unwrap(), ExtQ::Finite(q(0)));
        assert_eq!(n.evaluate(&qv(&[1, 0])).unwrap(), ExtQ::Finite(q(2)));
        assert_eq!(n.evaluate(&qv(&[0, 0])).unwrap(), ExtQ::PosInf);
        assert!(matches!(n.evaluate(&qv(&[1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn singular_basis_rejected() {
        let e = FiniteDimNorm::new(vec![qv(&[1, 2]), qv(&[2, 4])], qv(&[0, 0]));
        assert_eq!(e, Err(Error::SingularBasis));
    }

    #[test]
    fn joint_basis_trivial_pair_is_identity() {
        let t = FiniteDimNorm::trivial(3);
        let jb = t.joint_basis(&t).unwrap();
        assert_eq!(jb.columns, crate::linalg::identity(3));
    }

    #[test]
    fn joint_basis_tilted_pair() {
        let a = FiniteDimNorm::diagonal(qv(&[1, 0]));
        let b = tilted();
        let jb = a.joint_basis(&b).unwrap();
        assert!(a.is_orthogonal_basis(&jb.columns).unwrap());
        assert!(b.is_orthogonal_basis(&jb.columns).unwrap());
        let mut pairs: Vec<(Vec<Q>, Q, Q)> = jb
            .columns
            .iter()
            .cloned()
            .zip(jb.first.iter().cloned())
            .zip(jb.second.iter().cloned())
            .map(|((c, x), y)| (c, x, y))
            .collect();
        pairs.sort();
        assert_eq!(pairs, vec![(qv(&[1, 0]), q(1), q(0)), (qv(&[1, 1]), q(0), q(1))]);
        assert_eq!(a.relative_spectrum(&b).unwrap().values(), &qv(&[1, -1])[..]);
    }

    #[test]
    fn own_basis_is_joint_basis_with_itself() {
        let b = tilted();
        let jb = b.joint_basis(&b).unwrap();
        assert_eq!(jb.columns, b.columns());
        assert_eq!(b.relative_spectrum(&b).unwrap().values(), &qv(&[0, 0])[..]);
    }

    #[test]
    fn distances() {
        let a = chi20();
        let t = FiniteDimNorm::trivial(2);
        assert_eq!(a.relative_spectrum(&t).unwrap().values(), &qv(&[2, 0])[..]);
        assert_eq!(a.distance(&t, &Exponent::int(1)).unwrap().exact_value(), Some(&q(1)));
        assert_eq!(a.distance(&t, &Exponent::Infinity).unwrap().exact_value(), Some(&q(2)));
        assert_eq!(a.distance(&t, &Exponent::int(2)).unwrap().powered(), Some(&q(2)));
        let b = FiniteDimNorm::diagonal(qv(&[1, 1]));
        assert_eq!(a.distance(&b, &Exponent::int(1)).unwrap().exact_value(), Some(&q(1)));
        assert!(a.distance(&a, &Exponent::int(3)).unwrap().is_zero());
        assert!(matches!(
            a.distance(&b, &Exponent::Finite(qr(1, 2))),
            Err(Error::InvalidExponent(_))
        ));
    }

    #[test]
    fn minimum_and_volume_identity() {
        let a = chi20();
        let b = FiniteDimNorm::diagonal(qv(&[1, 1]));
        let m = a.min(&b).unwrap();
        assert_eq!(m.values(), &qv(&[1, 0])[..]);
        assert_eq!(a.min(&a).unwrap(), a);
        let d1 = a.distance(&b, &Exponent::int(1)).unwrap();
        assert_eq!(d1.exact_value().unwrap(), &(a.volume() + b.volume() - q(2) * m.volume()));
        assert_eq!(m.volume(), qr(1, 2));
    }

    #[test]
    fn volumes_and_spectral_measures() {
        let a = chi20();
        assert_eq!(a.volume(), q(1));
        assert_eq!(a.lambda_extremes(), (q(0), q(2)));
        let t = FiniteDimNorm::trivial(2);
        let s = a.spectral_measure(&t).unwrap();
        assert_eq!(s, DiscreteMeasure::new(vec![(q(2), qr(1, 2)), (q(0), qr(1, 2))]).unwrap());
        assert_eq!(t.volume(), q(0));
        assert_eq!(t.spectral_measure(&t).unwrap(), DiscreteMeasure::dirac(q(0)));
        let b = FiniteDimNorm::diagonal(qv(&[1, 1]));
        let s = a.spectral_measure(&b).unwrap();
        assert_eq!(s, DiscreteMeasure::new(vec![(q(1), qr(1, 2)), (q(-1), qr(1, 2))]).unwrap());
        assert_eq!(s.mean(), a.volume() - b.volume());
    }

    #[test]
    fn retraction() {
        let chi = tilted();
        let r = chi.gram_schmidt_retract(&crate::linalg::identity(2)).unwrap();
        assert_eq!(r.values(), &qv(&[0, 1])[..]);
        assert_eq!(r.volume(), qr(1, 2));
        let d = chi20();
        assert_eq!(d.gram_schmidt_retract(&crate::linalg::identity(2)).unwrap().values(), d.values());
        let t = FiniteDimNorm::trivial(2);
        let e = vec![qv(&[1, 2]), qv(&[3, 1])];
        assert_eq!(t.gram_schmidt_retract(&e).unwrap().values(), &qv(&[0, 0])[..]);
        assert_eq!(
            t.gram_schmidt_retract(&vec![qv(&[1, 2]), qv(&[2, 4])]),
            Err(Error::SingularBasis)
        );
    }

    #[test]
    fn symmetric_powers() {
        let a = FiniteDimNorm::diagonal(qv(&[1, 0]));
        assert_eq!(a.symmetric_power(2).unwrap().values(), &qv(&[2, 1, 0])[..]);
        assert_eq!(a.symmetric_power(3).unwrap().values(), &qv(&[3, 2, 1, 0])[..]);
        let t = FiniteDimNorm::trivial(2).symmetric_power(4).unwrap();
        assert!(t.values().iter().all(Zero::is_zero));
        assert!(a.symmetric_power(0).is_err());
        // the induced basis of a tilted norm stays orthogonal
        let s = tilted().symmetric_power(2).unwrap();
        assert_eq!(s.values(), &qv(&[2, 1, 0])[..]);
        // (e1 + e2)^2 = e1^2 + 2 e1 e2 + e2^2
        assert_eq!(s.column(0), qv(&[1, 2, 1]));
        assert_eq!(s.evaluate(&qv(&[1, 2, 1])).unwrap(), ExtQ::Finite(q(2)));
    }
}
