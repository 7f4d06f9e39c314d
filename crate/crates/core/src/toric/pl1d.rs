//! Continuous piecewise-linear functions of one variable, used for
//! two-sided bounds on sampled concave data.

use num_traits::{Signed, Zero};

use crate::rational::{pow_q, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Pl1d {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl Pl1d {
    /// Linear interpolation through `(xs[i], ys[i])`, with `xs` increasing.
    pub fn new(xs: Vec<Q>, ys: Vec<Q>) -> Self {
        debug_assert!(xs.len() == ys.len() && xs.len() >= 2);
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        Pl1d { xs, ys }
    }

    pub fn breaks(&self) -> &[Q] {
        &self.xs
    }

    pub fn eval(&self, x: &Q) -> Q {
        let k = match self.xs.binary_search(x) {
            Ok(i) => return self.ys[i].clone(),
            Err(i) => i.clamp(1, self.xs.len() - 1),
        };
        lerp(&self.xs[k - 1], &self.ys[k - 1], &self.xs[k], &self.ys[k], x)
    }

    /// Chord interpolant of concave samples: a lower bound.
    pub fn chords(points: &[(Q, Q)]) -> Self {
        Pl1d::new(points.iter().map(|p| p.0.clone()).collect(), points.iter().map(|p| p.1.clone()).collect())
    }

    /// Upper bound for a concave function through the given samples: on
    /// each interval, the minimum of the neighbouring chords extended.
    /// Needs at least three samples.
    pub fn tangent_envelope(points: &[(Q, Q)]) -> Option<Self> {
        let n = points.len();
        if n < 3 {
            return None;
        }
        let chord = |i: usize| -> (Q, Q) {
            let (x0, y0) = &points[i];
            let (x1, y1) = &points[i + 1];
            let s = (y1 - y0) / (x1 - x0);
            let c = y0 - &s * x0;
            (s, c)
        };
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n - 1 {
            let mut lines = Vec::new();
            if i > 0 {
                lines.push(chord(i - 1));
            }
            if i + 2 < n {
                lines.push(chord(i + 1));
            }
            let (a, b) = (&points[i].0, &points[i + 1].0);
            let f = |x: &Q| lines.iter().map(|(s, c)| s * x + c).min().expect("one line");
            xs.push(a.clone());
            ys.push(f(a));
            if lines.len() == 2 && lines[0].0 != lines[1].0 {
                let x = (&lines[1].1 - &lines[0].1) / (&lines[0].0 - &lines[1].0);
                if &x > a && &x < b {
                    xs.push(x.clone());
                    ys.push(f(&x));
                }
            }
            if i == n - 2 {
                xs.push(b.clone());
                ys.push(f(b));
            }
        }
        Some(Pl1d::new(xs, ys))
    }

    /// Pointwise `op(self, other)` on a common domain, where `op` is affine
    /// wherever `self`, `other`, `self - other` and `self + other` keep
    /// their signs.
    pub fn combine(&self, other: &Pl1d, op: impl Fn(&Q, &Q) -> Q) -> Pl1d {
        let mut xs: Vec<Q> = self.xs.iter().chain(&other.xs).cloned().collect();
        xs.sort();
        xs.dedup();
        let mut all = Vec::new();
        for w in xs.windows(2) {
            all.push(w[0].clone());
            let (a0, a1) = (self.eval(&w[0]), self.eval(&w[1]));
            let (b0, b1) = (other.eval(&w[0]), other.eval(&w[1]));
            let mut cuts = Vec::new();
            for (u0, u1) in [
                (a0.clone(), a1.clone()),
                (b0.clone(), b1.clone()),
                (&a0 - &b0, &a1 - &b1),
                (&a0 + &b0, &a1 + &b1),
            ] {
                if (u0.is_positive() && u1.is_negative()) || (u0.is_negative() && u1.is_positive()) {
                    let s = &u0 / (&u0 - &u1);
                    cuts.push(&w[0] + (&w[1] - &w[0]) * s);
                }
            }
            cuts.sort();
            cuts.dedup();
            all.extend(cuts);
        }
        all.push(xs.last().expect("nonempty").clone());
        let ys = all.iter().map(|x| op(&self.eval(x), &other.eval(x))).collect();
        Pl1d::new(all, ys)
    }

    /// `int y^p dx` for a function that is nonnegative throughout.
    pub fn integrate_power(&self, p: u32) -> Q {
        let mut acc = Q::zero();
        for i in 0..self.xs.len() - 1 {
            let (y0, y1) = (&self.ys[i], &self.ys[i + 1]);
            let s: Q = (0..=p).map(|k| pow_q(y0, k) * pow_q(y1, p - k)).sum();
            acc += (&self.xs[i + 1] - &self.xs[i]) * s / Q::from_integer((p + 1).into());
        }
        acc
    }

    pub fn max(&self) -> Q {
        self.ys.iter().max().expect("nonempty").clone()
    }

    pub fn sub(&self, other: &Pl1d) -> Pl1d {
        self.combine(other, |a, b| a - b)
    }
}

fn lerp(x0: &Q, y0: &Q, x1: &Q, y1: &Q, x: &Q) -> Q {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Bounds on `int |f|^p` (or `sup |f|` when `p` is `None`) for any `f` with
/// `lo <= f <= hi`.
pub fn abs_bounds(lo: &Pl1d, hi: &Pl1d, p: Option<u32>) -> (Q, Q) {
    let zero = Q::zero();
    let inner = lo.combine(hi, |a, b| {
        if a.is_positive() {
            a.clone()
        } else if b.is_negative() {
            -b.clone()
        } else {
            zero.clone()
        }
    });
    let outer = lo.combine(hi, |a, b| a.abs().max(b.abs()));
    match p {
        Some(p) => (inner.integrate_power(p), outer.integrate_power(p)),
        None => (inner.max(), outer.max()),
    }
}
