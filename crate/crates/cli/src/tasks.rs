//! Task execution and JSON encodings of results.

use std::collections::BTreeMap;

use filtra::energy::{energy, energy_dual, minimum_norm, minimum_norm_via_dual, t_and_s_invariants, OTOptions};
use filtra::polytope::{biconjugate_samples, ConcavePLFunction};
use filtra::rational::{fmt_q, Q};
use filtra::toric::{Enclosure, SpectralMeasure, ToricDistance, ToricHomNorm, TruncatedToricNorm};
use filtra::{DiscreteMeasure, PLMeasure1D};
use serde_json::{json, Value};

use crate::scene::{NormObject, Op, Scene, Task};

/// Settings shared by all tasks of a run.
#[derive(Clone, Debug)]
pub struct RunOptions {
    pub tolerance: f64,
    pub csv: bool,
}

pub struct TaskOutput {
    pub json: Value,
    pub csv: Option<String>,
}

pub fn q(x: &Q) -> Value {
    Value::String(fmt_q(x))
}

pub fn point(p: &[Q]) -> Value {
    if p.len() == 1 {
        q(&p[0])
    } else {
        Value::Array(p.iter().map(q).collect())
    }
}

fn enclosure(e: &Enclosure) -> Value {
    match e.value() {
        Some(v) => q(v),
        None => json!({ "lower": q(&e.lower), "upper": q(&e.upper) }),
    }
}

pub fn pl_norm(g: &ConcavePLFunction) -> Value {
    json!({ "kind": "pl-min", "pieces": g.sorted_pieces() })
}

fn distance(d: &ToricDistance) -> Value {
    match d.exact() {
        Some(exact) => {
            let mut out = json!({ "p": d.p.to_string(), "powered": enclosure(&d.powered), "approx": exact.to_f64() });
            if let Some(v) = exact.exact_value() {
                out["value"] = q(v);
            }
            out
        }
        None => json!({ "p": d.p.to_string(), "powered": enclosure(&d.powered) }),
    }
}

fn pl_measure(m: &PLMeasure1D) -> Value {
    json!({
        "kind": "exact",
        "breaks": m.breaks().iter().map(q).collect::<Vec<_>>(),
        "cdf_at_breaks": m.breaks().iter().map(|b| q(&m.cdf(b))).collect::<Vec<_>>(),
        "pieces": m.pieces().iter().map(|p| p.coeffs().iter().map(q).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "mean": q(&m.mean()),
    })
}

fn discrete_csv(m: &DiscreteMeasure<Q>) -> String {
    let mut out = String::from("t,cdf\n");
    for (a, _) in m.atoms() {
        out.push_str(&format!("{},{}\n", fmt_q(a), fmt_q(&m.cdf(a))));
    }
    out
}

fn point_csv(m: &DiscreteMeasure<Vec<Q>>) -> String {
    let n = m.atoms().next().map_or(0, |(a, _)| a.len());
    let mut out: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    out.push("mass".into());
    let mut text = out.join(",") + "\n";
    for (a, mass) in m.atoms() {
        let mut row: Vec<String> = a.iter().map(fmt_q).collect();
        row.push(fmt_q(mass));
        text.push_str(&row.join(","));
        text.push('\n');
    }
    text
}

pub fn truncated(h: &TruncatedToricNorm) -> Value {
    let levels: BTreeMap<String, Value> = h
        .degrees()
        .map(|m| {
            let entries: Vec<Value> = h
                .level(m)
                .expect("listed degree")
                .iter()
                .map(|(b, v)| json!({ "point": b, "value": q(v) }))
                .collect();
            (m.to_string(), Value::Array(entries))
        })
        .collect();
    json!({ "kind": "truncated", "base_degree": h.base_degree(), "bound": q(h.bound()), "levels": levels })
}

pub fn run_task(scene: &Scene, task: &Task, opts: &RunOptions) -> Result<TaskOutput, String> {
    let e = |x: filtra::Error| x.to_string();
    let hom = |n: &str| match &scene.norms[n] {
        NormObject::Hom(h) => h,
        NormObject::Truncated(_) => unreachable!("checked at validation"),
    };
    let trunc = |n: &str| match &scene.norms[n] {
        NormObject::Truncated(t) => t,
        NormObject::Hom(_) => unreachable!("checked at validation"),
    };
    let plain = |v: Value| Ok(TaskOutput { json: v, csv: None });
    let ot = OTOptions { tolerance: opts.tolerance, ..OTOptions::default() };
    match &task.op {
        Op::Legendre { norm } => {
            let g = hom(norm).require_pl("legendre").map_err(e)?;
            plain(serde_json::to_value(g.legendre().pieces()).expect("pieces serialize"))
        }
        Op::Vol { norm } => plain(enclosure(&hom(norm).volume().map_err(e)?)),
        Op::Energy { norm } => plain(enclosure(&energy(hom(norm)).map_err(e)?)),
        Op::LambdaMax { norm } => plain(q(&hom(norm).lambda_max())),
        Op::Distance { a, b, p } => plain(distance(&hom(a).distance(hom(b), p).map_err(e)?)),
        Op::SpectralMeasure { norm } => match hom(norm).spectral_measure().map_err(e)? {
            SpectralMeasure::Exact(m) => {
                let csv = opts.csv.then(|| m.to_csv(&m.default_grid(64)));
                Ok(TaskOutput { json: pl_measure(&m), csv })
            }
            SpectralMeasure::Empirical(m) => {
                let csv = opts.csv.then(|| discrete_csv(&m));
                let mut v = serde_json::to_value(&m).expect("measure serializes");
                v["kind"] = json!("empirical");
                Ok(TaskOutput { json: v, csv })
            }
        },
        Op::SpectralMeasureTruncated { norm, m } => {
            let mu = trunc(norm).spectral_measure(*m).map_err(e)?;
            let csv = opts.csv.then(|| discrete_csv(&mu));
            Ok(TaskOutput { json: serde_json::to_value(&mu).expect("measure serializes"), csv })
        }
        Op::Fs { norm, xi } => plain(q(&hom(norm).fs_at(xi).map_err(e)?)),
        Op::MongeAmpere { norm } => {
            let mu = hom(norm).monge_ampere().map_err(e)?;
            let csv = opts.csv.then(|| point_csv(&mu));
            Ok(TaskOutput { json: serde_json::to_value(&mu).expect("measure serializes"), csv })
        }
        Op::CanonicalApproximant { norm, d } => {
            let approx = match &scene.norms[norm] {
                NormObject::Hom(h) => h.canonical_approximant(*d),
                NormObject::Truncated(t) => t.canonical_approximant(*d),
            }
            .map_err(e)?;
            plain(pl_norm(approx.as_pl().expect("approximants are PL")))
        }
        Op::RoundDown { norm } => plain(truncated(&trunc(norm).round_down())),
        Op::FiniteType { norm } => plain(serde_json::to_value(hom(norm).is_finite_type()).expect("serializes")),
        Op::QuotientD1 { a, b } => plain(serde_json::to_value(hom(a).quotient_d1(hom(b)).map_err(e)?).expect("serializes")),
        Op::EnergyDual { measure } => {
            let sol = energy_dual(&scene.polytope, &scene.measures[measure], &ot).map_err(e)?;
            plain(json!({ "value": sol.value.to_string(), "solution": sol }))
        }
        Op::MinimumNorm { norm } => {
            let closed = minimum_norm(hom(norm)).map_err(e)?;
            let check = minimum_norm_via_dual(hom(norm), &ot).map_err(e)?;
            plain(json!({ "value": q(&closed), "dual_check": check.value.to_string(), "residual": check.residual }))
        }
        Op::TAndS { xi } => {
            let (t, s) = t_and_s_invariants(&scene.polytope, xi).map_err(e)?;
            plain(json!({ "T": q(&t), "S": q(&s) }))
        }
        Op::Biconjugate { norm } => {
            let g = hom(norm);
            let samples: Vec<(Vec<Q>, Q)> = match g {
                ToricHomNorm::Pl(pl) => pl
                    .subdivision_vertices()
                    .into_iter()
                    .map(|v| {
                        let y = pl.evaluate(&v);
                        (v, y)
                    })
                    .collect(),
                ToricHomNorm::Sampled(s) => s.samples().to_vec(),
            };
            plain(pl_norm(&biconjugate_samples(&scene.polytope, &samples).map_err(e)?))
        }
        Op::ActiveCells { norm } => {
            let g = hom(norm).require_pl("active-cells").map_err(e)?;
            let mut cells: Vec<Value> = g
                .active_cells()
                .map(|(p, c)| {
                    json!({ "piece": p, "vertices": c.vertices().iter().map(|v| point(v)).collect::<Vec<_>>(), "volume": q(&c.volume()) })
                })
                .collect();
            cells.sort_by_key(|c| c.to_string());
            plain(Value::Array(cells))
        }
    }
}
