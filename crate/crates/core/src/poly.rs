//! Polynomials with rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::linalg::{determinant, Matrix};
use crate::rational::{factorial, pow_q, Q};

/// Univariate polynomial `c[0] + c[1] t + ...`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UPoly {
    coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn constant(c: Q) -> Self {
        Self::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * t + c)
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer((i as i64).into()))
                .collect(),
        )
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return UPoly::default();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UPoly::new(out)
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default()
                        + other.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    /// Exact integral over `[a, b]`.
    pub fn integrate(&self, a: &Q, b: &Q) -> Q {
        let anti: Vec<Q> = std::iter::once(Q::zero())
            .chain(
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c / Q::from_integer(((i + 1) as i64).into())),
            )
            .collect();
        let anti = UPoly::new(anti);
        anti.eval(b) - anti.eval(a)
    }

    /// Lagrange interpolation through distinct nodes.
    pub fn interpolate(points: &[(Q, Q)]) -> UPoly {
        let mut acc = UPoly::default();
        for (i, (xi, yi)) in points.iter().enumerate() {
            let mut basis = UPoly::constant(yi.clone());
            for (j, (xj, _)) in points.iter().enumerate() {
                if i != j {
                    let denom = xi - xj;
                    basis = basis.mul(&UPoly::new(vec![-xj / &denom, Q::one() / &denom]));
                }
            }
            acc = acc.add(&basis);
        }
        acc
    }
}

/// Multivariate polynomial keyed by exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, Q)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(e, c);
        }
        p
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::from_terms(nvars, [(vec![0; nvars], c)])
    }

    /// `a + sum_j b_j t_j`.
    pub fn affine(a: Q, b: &[Q]) -> Self {
        let n = b.len();
        let mut p = Poly::constant(n, a);
        for (j, bj) in b.iter().enumerate() {
            let mut e = vec![0; n];
            e[j] = 1;
            p.add_term(e, bj.clone());
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Q)> {
        self.terms.iter()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, (e, c)| {
            let mono = e
                .iter()
                .zip(x)
                .fold(Q::one(), |m, (&k, xi)| m * pow_q(xi, k));
            acc + c * mono
        })
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut p = self.clone();
        for (e, c) in &other.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), c * s)))
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut p = Poly::zero(self.nvars.max(other.nvars));
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    fn pow(&self, k: u32) -> Poly {
        let mut r = Poly::constant(self.nvars, Q::one());
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Substitutes `x_i = origin_i + sum_j m[i][j] t_j`, returning a
    /// polynomial in `t`.
    pub fn compose_affine(&self, origin: &[Q], m: &Matrix) -> Poly {
        let nt = m.first().map_or(0, |r| r.len());
        let subs: Vec<Poly> = (0..self.nvars).map(|i| Poly::affine(origin[i].clone(), &m[i])).collect();
        let mut out = Poly::zero(nt);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(nt, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&subs[i].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// Integral over the standard simplex `{t >= 0, sum t <= 1}`.
    pub fn integrate_standard_simplex(&self) -> Q {
        let n = self.nvars as u64;
        self.terms.iter().fold(Q::zero(), |acc, (e, c)| {
            let num = e.iter().fold(num_bigint::BigInt::one(), |m, &k| m * factorial(k as u64));
            let total: u64 = e.iter().map(|&k| k as u64).sum::<u64>() + n;
            acc + c * Q::new(num, factorial(total))
        })
    }

    /// Exact integral over the simplex with the given `nvars + 1` vertices.
    pub fn integrate_simplex(&self, vertices: &[Vec<Q>]) -> Q {
        let n = self.nvars;
        assert_eq!(vertices.len(), n + 1, "simplex vertex count");
        let v0 = &vertices[0];
        let m: Matrix = (0..n)
            .map(|i| (1..=n).map(|j| &vertices[j][i] - &v0[i]).collect())
            .collect();
        let jac = determinant(&m);
        let jac = if jac < Q::zero() { -jac } else { jac };
        self.compose_affine(v0, &m).integrate_standard_simplex() * jac
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr, qv};

    #[test]
    fn univariate_basics() {
        let p = UPoly::new(qv(&[0, 1, -1])); // t - t^2
        assert_eq!(p.integrate(&q(0), &q(1)), qr(1, 6));
        assert_eq!(p.derivative(), UPoly::new(qv(&[1, -2])));
        let pts = vec![(q(0), q(0)), (qr(1, 2), qr(1, 4)), (q(1), q(0))];
        assert_eq!(UPoly::interpolate(&pts), p);
    }

    #[test]
    fn simplex_integrals() {
        // x*(1-x) on [0,1]
        let p = Poly::from_terms(1, [(vec![1], q(1)), (vec![2], q(-1))]);
        assert_eq!(p.integrate_simplex(&[qv(&[0]), qv(&[1])]), qr(1, 6));
        // x*y over the unit right triangle = 1/24
        let xy = Poly::from_terms(2, [(vec![1, 1], q(1))]);
        assert_eq!(xy.integrate_simplex(&[qv(&[0, 0]), qv(&[1, 0]), qv(&[0, 1])]), qr(1, 24));
        // constant over a scaled triangle gives its area
        let one = Poly::constant(2, q(1));
        assert_eq!(one.integrate_simplex(&[qv(&[0, 0]), qv(&[2, 0]), qv(&[0, 3])]), q(3));
    }
}
