//! The acceptance suite: ten checks with fixed tolerances and time budgets.

use std::time::{Duration, Instant};

use num_traits::{Signed, Zero};

use crate::energy::{energy_dual, minimum_norm, reverify, OTOptions};
use crate::fdnorm::FiniteDimNorm;
use crate::lp::{Distance, Exponent};
use crate::measure::DiscreteMeasure;
use crate::poly::Poly;
use crate::polytope::{biconjugate_samples, AffinePiece, RationalPolytope};
use crate::rational::{binomial, dot, pow_q, q, qr, qv, to_f64, Q};
use crate::sampling::{self, Rng8};
use crate::toric::{SampleSource, ToricHomNorm, TruncatedToricNorm};
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub seed: u64,
    /// Matches a criterion's group, name, or number.
    pub filter: Option<String>,
    /// Mass tolerance for the transport solver.
    pub tolerance: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config { seed: 2024, filter: None, tolerance: 1e-6 }
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub group: &'static str,
    pub budget: Duration,
    check: fn(&Config) -> Result<String, String>,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub group: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "legendre-closed-form", group: "polytope", budget: secs(1), check: legendre_closed_form },
    Criterion { id: 2, name: "volume-and-ma", group: "toric", budget: secs(1), check: volume_and_ma },
    Criterion { id: 3, name: "spectral-limit", group: "toric", budget: secs(1), check: spectral_limit },
    Criterion { id: 4, name: "dp-lambda-max", group: "toric", budget: secs(10), check: dp_lambda_max },
    Criterion { id: 5, name: "approximants", group: "toric", budget: secs(5), check: approximants },
    Criterion { id: 6, name: "valuation-chain", group: "energy", budget: secs(10), check: valuation_chain },
    Criterion { id: 7, name: "ot-fixed-point", group: "energy", budget: secs(10), check: ot_fixed_point },
    Criterion { id: 8, name: "fd-identities", group: "fd", budget: secs(10), check: fd_identities },
    Criterion { id: 9, name: "operator-calculus", group: "polytope", budget: secs(5), check: operator_calculus },
    Criterion { id: 10, name: "dinf-identity", group: "toric", budget: secs(5), check: dinf_identity },
];

impl Criterion {
    pub fn matches(&self, filter: Option<&str>) -> bool {
        filter.is_none_or(|f| f == self.group || self.name.contains(f) || f == self.id.to_string())
    }
}

pub fn run(config: &Config) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter(|c| c.matches(config.filter.as_deref()))
        .map(|c| {
            let start = Instant::now();
            let result = (c.check)(config);
            let elapsed = start.elapsed();
            let (passed, detail) = match result {
                Ok(d) if elapsed <= c.budget => (true, d),
                Ok(d) => (false, format!("{d}; over budget")),
                Err(e) => (false, e),
            };
            Outcome { id: c.id, name: c.name, group: c.group, passed, detail, elapsed, budget: c.budget }
        })
        .collect()
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<22} {:>8.3}s / {:>2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn unit() -> RationalPolytope {
    RationalPolytope::unit_cube(1)
}

fn min_alpha_third() -> ToricHomNorm {
    ToricHomNorm::divisorial(unit(), vec![AffinePiece::new(qv(&[1]), q(0)), AffinePiece::new(qv(&[0]), qr(1, 3))])
        .expect("two pieces")
}

fn legendre_closed_form(_: &Config) -> Result<String, String> {
    let g = min_alpha_third();
    let got = g.as_pl().expect("PL").legendre().pieces().to_vec();
    let want = vec![
        AffinePiece::new(qv(&[1]), qr(1, 3)),
        AffinePiece::new(vec![qr(1, 3)], qr(1, 3)),
        AffinePiece::new(qv(&[0]), q(0)),
    ];
    ensure(got == want, || format!("pieces {got:?}"))?;
    Ok("max{xi+1/3, xi/3+1/3, 0}".into())
}

fn volume_and_ma(_: &Config) -> Result<String, String> {
    let g = min_alpha_third();
    let vol = g.volume().map_err(err)?;
    ensure(vol.value() == Some(&qr(5, 18)), || format!("vol {vol:?}"))?;
    let ma = g.monge_ampere().map_err(err)?;
    let want = DiscreteMeasure::new(vec![(qv(&[1]), qr(1, 3)), (qv(&[0]), qr(2, 3))]).map_err(err)?;
    ensure(ma == want, || format!("MA {ma:?}"))?;
    Ok("vol 5/18, MA 1/3 d_1 + 2/3 d_0".into())
}

fn spectral_limit(_: &Config) -> Result<String, String> {
    let degrees = [1, 2, 5, 10, 20, 50, 100];
    let h = TruncatedToricNorm::from_fn(unit(), 1, &degrees, q(1), |m, b| if b[0] >= 1 { q(m.into()) } else { q(0) })
        .map_err(err)?;
    let mut w100 = q(1);
    for m in [10u32, 100] {
        let w = h.spectral_measure(m).map_err(err)?.wasserstein1(&DiscreteMeasure::dirac(q(1)));
        ensure(w == qr(1, i64::from(m) + 1), || format!("W1 at m={m} is {w}"))?;
        w100 = w;
    }
    ensure(w100 <= qr(1, 100), || format!("W1 at m=100 is {w100}"))?;
    Ok(format!("W1 = 1/11, {w100}"))
}

fn dp_lambda_max(cfg: &Config) -> Result<String, String> {
    let mut rng = sampling::rng(cfg.seed);
    let check = |g: &ToricHomNorm, n: usize, tight: bool| -> Result<(), String> {
        let triv = ToricHomNorm::trivial(g.carrier().clone());
        let lmax = g.lambda_max();
        for p in 1..=3u32 {
            let d = g.distance(&triv, &Exponent::int(p)).map_err(err)?;
            let dp = d.powered.value().ok_or("inexact distance")?.clone();
            let lhs = pow_q(&lmax, p);
            let rhs = binomial(n as u64 + u64::from(p), n as u64) * &dp;
            ensure(lhs <= rhs, || format!("n={n} p={p}: {lhs} > {rhs}"))?;
            if tight && p == 1 {
                ensure(lhs == rhs, || format!("expected equality, got {lhs} vs {rhs}"))?;
            }
        }
        Ok(())
    };
    for i in 0..200 {
        let n = 1 + i % 2;
        let carrier = sampling::carrier(&mut rng, n);
        let g = sampling::pl_norm(&mut rng, &carrier, 4);
        check(&g, n, false)?;
    }
    check(&ToricHomNorm::from_valuation(unit(), qv(&[2])).map_err(err)?, 1, true)?;
    Ok("200 instances; equality at g = 2a".into())
}

/// `a(1 - a)` on `[0, 1]`, sampled on the `1/128` grid.
pub fn parabola_norm() -> ToricHomNorm {
    let p = Poly::from_terms(1, [(vec![1], q(1)), (vec![2], q(-1))]);
    ToricHomNorm::sampled(unit(), 128, SampleSource::Polynomial(p)).expect("concave samples")
}

fn approximants(_: &Config) -> Result<String, String> {
    let g = parabola_norm();
    let mut prev: Option<Q> = None;
    for d in [2u32, 4, 8, 16, 32, 64] {
        let gd = g.canonical_approximant(d).map_err(err)?;
        let dist = gd.distance(&g, &Exponent::int(1)).map_err(err)?;
        let v = dist.powered.value().ok_or_else(|| format!("no exact d_1 at d={d}"))?.clone();
        if d == 2 {
            ensure(v == qr(1, 24), || format!("d_1 at d=2 is {v}"))?;
        }
        if let Some(p) = &prev {
            ensure(&v < p, || format!("not decreasing at d={d}: {v} >= {p}"))?;
        }
        prev = Some(v);
    }
    let last = prev.expect("six degrees");
    ensure(last < qr(1, 100), || format!("d_1 at d=64 is {last}"))?;
    Ok(format!("d_1: 1/24 ... {last}"))
}

fn valuation_chain(cfg: &Config) -> Result<String, String> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(6));
    let square = RationalPolytope::unit_cube(2);
    let bary = square.barycenter();
    let opts = OTOptions { tolerance: cfg.tolerance, ..OTOptions::default() };
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let xi = sampling::vector(&mut rng, 2, 5, 4);
        let g = ToricHomNorm::from_valuation(square.clone(), xi.clone()).map_err(err)?;
        let s = dot(&xi, &bary) - square.min_linear(&xi);
        let vol = g.volume().map_err(err)?;
        ensure(vol.value() == Some(&s), || format!("vol {vol:?} vs S {s}"))?;
        let mn = minimum_norm(&g).map_err(err)?;
        ensure(mn == s, || format!("minimum norm {mn} vs S {s}"))?;
        let dual = energy_dual(&square, &DiscreteMeasure::dirac(xi), &opts).map_err(err)?;
        let gap = (dual.value - to_f64(&s)).abs();
        worst = worst.max(gap);
        ensure(gap <= 1e-9, || format!("E^vee off by {gap}"))?;
    }
    Ok(format!("50 valuations; max |E^vee - S| = {worst:.1e}"))
}

fn ot_fixed_point(cfg: &Config) -> Result<String, String> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(7));
    let square = RationalPolytope::unit_cube(2);
    let opts = OTOptions { tolerance: cfg.tolerance.min(1e-6), ..OTOptions::default() };
    let mut atoms: Vec<Vec<Q>> = Vec::new();
    while atoms.len() < 4 {
        let a = sampling::vector(&mut rng, 2, 2, 2);
        if !atoms.contains(&a) {
            atoms.push(a);
        }
    }
    let mu = DiscreteMeasure::new(atoms.into_iter().map(|a| (a, qr(1, 4))).collect()).map_err(err)?;
    let sol = energy_dual(&square, &mu, &opts).map_err(err)?;
    ensure(sol.residual <= 1e-6, || format!("residual {}", sol.residual))?;
    let (re, _) = reverify(&square, &mu, &sol);
    ensure((re - sol.value).abs() <= 1e-8, || format!("re-evaluation {re} vs {}", sol.value))?;
    let half = DiscreteMeasure::new(vec![(qv(&[0]), qr(1, 2)), (qv(&[1]), qr(1, 2))]).map_err(err)?;
    let one_d = energy_dual(&unit(), &half, &opts).map_err(err)?;
    ensure((one_d.value - 0.125).abs() <= 1e-8, || format!("1-D instance gave {}", one_d.value))?;
    Ok(format!("residual {:.1e} after {} steps; 1-D value {}", sol.residual, sol.iterations, one_d.value))
}

fn fd_identities(cfg: &Config) -> Result<String, String> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(8));
    let spectrum = |a: &FiniteDimNorm, b: &FiniteDimNorm| -> Result<Vec<Q>, String> {
        Ok(a.relative_spectrum(b).map_err(err)?.values().to_vec())
    };
    let powered = |s: &[Q], p: u32| -> Q {
        Distance::from_deviations(&Exponent::int(p), s).expect("integer p").powered().expect("exact").clone()
    };
    let d = |a: &FiniteDimNorm, b: &FiniteDimNorm, p: u32| -> Result<Q, String> { Ok(powered(&spectrum(a, b)?, p)) };
    for i in 0..100 {
        let (x, y) = (sampling::fd_norm(&mut rng, 5), sampling::fd_norm(&mut rng, 5));
        let m = x.min(&y).map_err(err)?;
        let d1 = d(&x, &y, 1)?;
        ensure(d1 == x.volume() + y.volume() - q(2) * m.volume(), || format!("pair {i}: d1 vs volumes"))?;
        let (sxy, sxm, smy) = (spectrum(&x, &y)?, spectrum(&x, &m)?, spectrum(&m, &y)?);
        for p in 1..=3 {
            let (a, b, c) = (powered(&sxy, p), powered(&sxm, p), powered(&smy, p));
            ensure(a == b + c, || format!("pair {i}: Pythagorean p={p}"))?;
        }
        let e = sampling::basis(&mut rng, 5);
        let rx = x.gram_schmidt_retract(&e).map_err(err)?;
        ensure(rx.volume() == x.volume(), || format!("pair {i}: retraction volume"))?;
        let ry = y.gram_schmidt_retract(&e).map_err(err)?;
        ensure(d(&rx, &ry, 1)? <= d1, || format!("pair {i}: retraction increases d1"))?;
        let (u, v) = (sampling::fd_norm(&mut rng, 5), sampling::fd_norm(&mut rng, 5));
        let lhs = d(&x.min(&u).map_err(err)?, &y.min(&v).map_err(err)?, 1)?;
        ensure(lhs <= d1 + d(&u, &v, 1)?, || format!("pair {i}: d1 of minima"))?;
    }
    Ok("100 pairs in dimension 5".into())
}

fn operator_calculus(cfg: &Config) -> Result<String, String> {
    let mut rng = sampling::rng(cfg.seed.wrapping_add(9));
    for i in 0..100 {
        let n = 1 + i % 2;
        let carrier = sampling::carrier(&mut rng, n);
        let g = sampling::pl_norm(&mut rng, &carrier, 4);
        let pl = g.as_pl().expect("PL");
        // fixed point on the samples of a concave PL function
        let mut pts = pl.subdivision_vertices();
        pts.extend(carrier.lattice_points(2).into_iter().map(|b| b.iter().map(|&x| qr(x, 2)).collect()));
        pts.sort();
        pts.dedup();
        let samples: Vec<(Vec<Q>, Q)> = pts.into_iter().map(|a| {
            let v = pl.evaluate(&a);
            (a, v)
        }).collect();
        let env = biconjugate_samples(&carrier, &samples).map_err(err)?;
        ensure(&env == pl, || format!("instance {i}: envelope differs from a concave input"))?;
        // idempotence on arbitrary samples
        let raw: Vec<(Vec<Q>, Q)> = carrier
            .lattice_points(2)
            .into_iter()
            .map(|b| (b.iter().map(|&x| qr(x, 2)).collect::<Vec<Q>>(), sampling::rational(&mut rng, 3, 2)))
            .collect();
        let once = biconjugate_samples(&carrier, &raw).map_err(err)?;
        ensure(raw.iter().all(|(a, v)| &once.evaluate(a) >= v), || format!("instance {i}: envelope below a sample"))?;
        let again: Vec<(Vec<Q>, Q)> = raw.iter().map(|(a, _)| (a.clone(), once.evaluate(a))).collect();
        let twice = biconjugate_samples(&carrier, &again).map_err(err)?;
        ensure(twice == once, || format!("instance {i}: not idempotent"))?;
    }
    Ok("100 norms".into())
}

fn dinf_identity(cfg: &Config) -> Result<String, String> {
    let mut rng: Rng8 = sampling::rng(cfg.seed.wrapping_add(10));
    for i in 0..50 {
        let n = 1 + rng.random_range(0..2usize);
        let carrier = sampling::carrier(&mut rng, n);
        let (v, w) = (sampling::vector(&mut rng, n, 4, 3), sampling::vector(&mut rng, n, 4, 3));
        let gv = ToricHomNorm::from_valuation(carrier.clone(), v.clone()).map_err(err)?;
        let gw = ToricHomNorm::from_valuation(carrier.clone(), w.clone()).map_err(err)?;
        let dinf = gv.distance(&gw, &Exponent::Infinity).map_err(err)?.powered.value().cloned().ok_or("inexact")?;
        let fs = gv.fs_at(&w).map_err(err)?.max(gw.fs_at(&v).map_err(err)?);
        ensure(dinf == fs, || format!("pair {i}: d_inf {dinf} vs fs {fs}"))?;
        let qd = gv.quotient_d1(&gw).map_err(err)?;
        ensure(qd.value <= dinf && !qd.value.is_negative(), || format!("pair {i}: quotient d1 {} > {dinf}", qd.value))?;
        ensure(!qd.exact || qd.shift.abs() <= q(2) * &dinf || dinf.is_zero(), || format!("pair {i}: shift"))?;
    }
    Ok("50 pairs".into())
}
