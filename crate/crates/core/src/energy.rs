//! Monge–Ampère energy, its dual through semi-discrete optimal transport,
//! and the minimum norm.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::DiscreteMeasure;
use crate::polytope::{Halfspace, RationalPolytope};
use crate::rational::{dot, rationalize, to_f64, Q};
use crate::toric::{Enclosure, ToricHomNorm};

/// `E(FS(chi)) = vol(chi)`.
pub fn energy(chi: &ToricHomNorm) -> Result<Enclosure> {
    chi.volume()
}

/// `(T, S)` of the valuation `xi`: `T = max_P g_xi`, `S = <xi, bary> - min_P <xi, .>`.
pub fn t_and_s_invariants(carrier: &RationalPolytope, xi: &[Q]) -> Result<(Q, Q)> {
    if xi.len() != carrier.dim() {
        return Err(Error::DimensionMismatch { expected: carrier.dim(), found: xi.len() });
    }
    let lo = carrier.min_linear(xi);
    Ok((carrier.max_linear(xi) - &lo, dot(xi, &carrier.barycenter()) - lo))
}

/// `||chi|| = int g - sum_j lambda_P(cell_j) (c_j + min_P <xi_j, .>)`.
pub fn minimum_norm(chi: &ToricHomNorm) -> Result<Q> {
    let g = chi.require_pl("minimum_norm")?;
    let p = g.carrier();
    let vol = p.volume();
    let correction: Q = g
        .active_cells()
        .map(|(piece, cell)| cell.volume() / &vol * (&piece.constant + p.min_linear(&piece.slope)))
        .sum();
    Ok(g.mean() - correction)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OTOptions {
    /// Target for `max_j |mass_j - m_j|`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Denominator cap when rationalizing weights for the exact cell kernel.
    pub max_denominator: u64,
    /// Weight decrease applied to atoms whose cell is empty.
    pub empty_cell_step: f64,
}

impl Default for OTOptions {
    fn default() -> Self {
        OTOptions { tolerance: 1e-6, max_iterations: 10_000, max_denominator: 1_000_000, empty_cell_step: 1e-2 }
    }
}

/// Result of the weight fit, with weights gauged so that `c_1 = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OTSolution {
    #[serde(serialize_with = "ser_points")]
    pub atoms: Vec<Vec<Q>>,
    pub weights: Vec<f64>,
    /// The weights actually used by the exact kernel.
    #[serde(serialize_with = "ser_qs")]
    pub exact_weights: Vec<Q>,
    pub masses: Vec<f64>,
    /// `E^vee(mu)`, evaluated exactly at `exact_weights`.
    #[serde(with = "crate::rational::serde_q")]
    pub value_exact: Q,
    pub value: f64,
    pub iterations: usize,
    pub residual: f64,
}

fn ser_qs<S: serde::Serializer>(xs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(crate::rational::fmt_q))
}

fn ser_points<S: serde::Serializer>(xs: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(xs.iter().map(|p| p.iter().map(crate::rational::fmt_q).collect::<Vec<_>>()))
}

/// Power cells `{ <xi_j, a> + c_j <= <xi_k, a> + c_k for all k }` and the
/// dual objective `F(c) = int min_j (<xi_j, .> + c_j) d lambda_P - sum m_j c_j`.
#[derive(Clone, Debug)]
pub struct DualEvaluation {
    pub weights: Vec<Q>,
    pub masses: Vec<Q>,
    pub objective: Q,
}

pub fn evaluate_dual(carrier: &RationalPolytope, atoms: &[Vec<Q>], targets: &[Q], weights: &[Q]) -> DualEvaluation {
    let vol = carrier.volume();
    let mut masses = Vec::with_capacity(atoms.len());
    let mut objective = Q::zero();
    for (j, xj) in atoms.iter().enumerate() {
        let hs: Vec<Halfspace> = atoms
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(k, xk)| {
                Halfspace::new(xj.iter().zip(xk).map(|(a, b)| a - b).collect(), &weights[k] - &weights[j])
            })
            .collect();
        match carrier.cut(&hs) {
            Some(cell) => {
                let v = cell.volume();
                objective += &v * (dot(xj, &cell.barycenter()) + &weights[j]) / &vol;
                masses.push(v / &vol);
            }
            None => masses.push(Q::zero()),
        }
        objective -= &targets[j] * &weights[j];
    }
    DualEvaluation { weights: weights.to_vec(), masses, objective }
}

/// `E^vee(mu) = max_c F(c) - sum_j m_j min_P <xi_j, .>`, by gradient ascent
/// with Armijo backtracking and Barzilai–Borwein step proposals.
pub fn energy_dual(carrier: &RationalPolytope, mu: &DiscreteMeasure<Vec<Q>>, opts: &OTOptions) -> Result<OTSolution> {
    let (atoms, targets): (Vec<Vec<Q>>, Vec<Q>) = mu.atoms().map(|(a, m)| (a.clone(), m.clone())).unzip();
    if let Some(a) = atoms.iter().find(|a| a.len() != carrier.dim()) {
        return Err(Error::DimensionMismatch { expected: carrier.dim(), found: a.len() });
    }
    let k = atoms.len();
    let eval = |c: &[f64]| {
        let w: Vec<Q> = c.iter().map(|&x| rationalize(x - c[0], opts.max_denominator)).collect();
        evaluate_dual(carrier, &atoms, &targets, &w)
    };
    let grad_of = |e: &DualEvaluation| -> Vec<f64> { e.masses.iter().zip(&targets).map(|(a, m)| to_f64(&(a - m))).collect() };
    let norm_inf = |g: &[f64]| g.iter().fold(0.0f64, |a, x| a.max(x.abs()));

    let mut cur = eval(&vec![0.0; k]);
    let mut c: Vec<f64> = cur.weights.iter().map(to_f64).collect();
    let mut grad = grad_of(&cur);
    let mut step = 1.0f64;
    let mut iterations = 0;
    while norm_inf(&grad) > opts.tolerance {
        if iterations >= opts.max_iterations {
            return Err(Error::NonConvergence { iterations, residual: norm_inf(&grad) });
        }
        iterations += 1;
        if cur.masses.iter().zip(&targets).any(|(a, m)| a.is_zero() && m.is_positive()) {
            for j in 0..k {
                if cur.masses[j].is_zero() {
                    c[j] -= opts.empty_cell_step;
                }
            }
            cur = eval(&c);
            c = cur.weights.iter().map(to_f64).collect();
            grad = grad_of(&cur);
            continue;
        }
        let mut t = step;
        let next = loop {
            let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x + t * g).collect();
            let e = eval(&trial);
            let moved: f64 = e.weights.iter().zip(&cur.weights).zip(&grad).map(|((a, b), g)| to_f64(&(a - b)) * g).sum();
            if moved > 0.0 && to_f64(&(&e.objective - &cur.objective)) >= 1e-4 * moved {
                break e;
            }
            t *= 0.5;
            if t < 1e-14 {
                return Err(Error::NonConvergence { iterations, residual: norm_inf(&grad) });
            }
        };
        let new_c: Vec<f64> = next.weights.iter().map(to_f64).collect();
        let new_grad = grad_of(&next);
        let s: Vec<f64> = new_c.iter().zip(&c).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = new_grad.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = s.iter().map(|a| a * a).sum();
        step = if sy < 0.0 { (ss / -sy).clamp(1e-8, 1e8) } else { (2.0 * t).min(1e8) };
        c = new_c;
        grad = new_grad;
        cur = next;
    }
    let shift: Q = atoms.iter().zip(&targets).map(|(a, m)| m * carrier.min_linear(a)).sum();
    let value_exact = &cur.objective - shift;
    Ok(OTSolution {
        atoms,
        weights: cur.weights.iter().map(to_f64).collect(),
        masses: cur.masses.iter().map(to_f64).collect(),
        value: to_f64(&value_exact),
        exact_weights: cur.weights,
        value_exact,
        iterations,
        residual: norm_inf(&grad),
    })
}

/// `||chi||` recomputed as `E^vee(MA(chi))` with the transport solver.
pub fn minimum_norm_via_dual(chi: &ToricHomNorm, opts: &OTOptions) -> Result<OTSolution> {
    energy_dual(chi.carrier(), &chi.monge_ampere()?, opts)
}

/// The divisorial norm `min_j (<xi_j, .> + c_j)` at the fitted weights.
pub fn fitted_norm(carrier: &RationalPolytope, sol: &OTSolution) -> Result<ToricHomNorm> {
    let pieces = sol
        .atoms
        .iter()
        .zip(&sol.exact_weights)
        .map(|(a, c)| crate::polytope::AffinePiece::new(a.clone(), c.clone()))
        .collect();
    ToricHomNorm::divisorial(carrier.clone(), pieces)
}

/// Whether a reported value matches the exact objective at the reported
/// weights to within `tol`.
pub fn reverify(carrier: &RationalPolytope, mu: &DiscreteMeasure<Vec<Q>>, sol: &OTSolution) -> (f64, f64) {
    let (atoms, targets): (Vec<Vec<Q>>, Vec<Q>) = mu.atoms().map(|(a, m)| (a.clone(), m.clone())).unzip();
    let w: Vec<Q> = sol.weights.iter().map(|&x| rationalize(x, u64::MAX >> 12)).collect();
    let e = evaluate_dual(carrier, &atoms, &targets, &w);
    let shift: Q = atoms.iter().zip(&targets).map(|(a, m)| m * carrier.min_linear(a)).sum();
    let residual = e.masses.iter().zip(&targets).map(|(a, m)| to_f64(&(a - m)).abs()).fold(0.0, f64::max);
    (to_f64(&(e.objective - shift)), residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::AffinePiece;
    use crate::rational::{q, qr, qv};

    fn seg() -> RationalPolytope {
        RationalPolytope::unit_cube(1)
    }

    #[test]
    fn minimum_norm_examples() {
        let g = ToricHomNorm::divisorial(
            seg(),
            vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[0]), qr(1, 3))],
        )
        .unwrap();
        assert_eq!(minimum_norm(&g).unwrap(), qr(1, 18));
        assert_eq!(minimum_norm(&ToricHomNorm::trivial(seg())).unwrap(), q(0));
        let v = ToricHomNorm::from_valuation(RationalPolytope::unit_cube(2), qv(&[1, -3])).unwrap();
        assert_eq!(minimum_norm(&v).unwrap(), v.volume().unwrap().lower);
    }

    #[test]
    fn t_and_s_examples() {
        assert_eq!(t_and_s_invariants(&seg(), &qv(&[2])).unwrap(), (q(2), q(1)));
        assert_eq!(t_and_s_invariants(&seg(), &qv(&[0])).unwrap(), (q(0), q(0)));
        assert_eq!(t_and_s_invariants(&RationalPolytope::unit_cube(2), &qv(&[1, 1])).unwrap(), (q(2), q(1)));
    }

    #[test]
    fn dual_examples() {
        let opts = OTOptions::default();
        let s = energy_dual(&seg(), &DiscreteMeasure::dirac(qv(&[2])), &opts).unwrap();
        assert_eq!(s.value_exact, q(1));
        let s = energy_dual(&seg(), &DiscreteMeasure::dirac(qv(&[0])), &opts).unwrap();
        assert_eq!(s.value_exact, q(0));
        let mu = DiscreteMeasure::new(vec![(qv(&[0]), qr(1, 2)), (qv(&[1]), qr(1, 2))]).unwrap();
        let s = energy_dual(&seg(), &mu, &opts).unwrap();
        assert!((s.value - 0.125).abs() < 1e-8, "{s:?}");
        assert!(s.residual <= 1e-6);
        assert_eq!(s.weights[0], 0.0);
    }

    #[test]
    fn dual_recovers_minimum_norm() {
        let g = ToricHomNorm::divisorial(
            seg(),
            vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[0]), qr(1, 3))],
        )
        .unwrap();
        let s = minimum_norm_via_dual(&g, &OTOptions::default()).unwrap();
        assert!((s.value - 1.0 / 18.0).abs() < 1e-8);
    }

    #[test]
    fn duplicate_atoms_are_rejected() {
        assert!(DiscreteMeasure::new(vec![(qv(&[0]), qr(1, 2)), (qv(&[0]), qr(1, 2))]).is_err());
    }
}
