//! Scene files: a polytope, named norms and measures, and a task list.

use std::collections::BTreeMap;

use filtra::poly::Poly;
use filtra::rational::Q;
use filtra::toric::{SampleSource, ToricHomNorm, TruncatedToricNorm};
use filtra::{AffinePiece, DiscreteMeasure, Exponent, RationalPolytope};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const VERSION: &str = "1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point(#[serde(with = "filtra::rational::serde_point")] pub Vec<Q>);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rational(#[serde(with = "filtra::rational::serde_q")] pub Q);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub version: String,
    pub polytope: PolytopeSpec,
    #[serde(default)]
    pub norms: BTreeMap<String, NormSpec>,
    #[serde(default)]
    pub measures: BTreeMap<String, DiscreteMeasure<Vec<Q>>>,
    #[serde(default)]
    pub tasks: Vec<TaskSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub vertices: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub point: Vec<i64>,
    pub value: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub exponent: Vec<u32>,
    pub coef: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum NormSpec {
    PlMin {
        pieces: Vec<AffinePiece>,
    },
    Valuation {
        xi: Point,
    },
    Trivial,
    Truncated {
        base_degree: u32,
        bound: Rational,
        /// Keyed by the degree written as a decimal string.
        levels: BTreeMap<String, Vec<TableEntry>>,
    },
    Sampled {
        pitch: u32,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        polynomial: Option<Vec<Term>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<TableEntry>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSpec {
    pub name: String,
    pub op: String,
    #[serde(default)]
    pub args: BTreeMap<String, Value>,
    pub output: String,
}

#[derive(Clone, Debug)]
pub enum NormObject {
    Hom(ToricHomNorm),
    Truncated(TruncatedToricNorm),
}

#[derive(Clone, Debug)]
pub enum Op {
    Legendre { norm: String },
    Vol { norm: String },
    LambdaMax { norm: String },
    Distance { a: String, b: String, p: Exponent },
    SpectralMeasure { norm: String },
    SpectralMeasureTruncated { norm: String, m: u32 },
    Fs { norm: String, xi: Vec<Q> },
    MongeAmpere { norm: String },
    CanonicalApproximant { norm: String, d: u32 },
    RoundDown { norm: String },
    FiniteType { norm: String },
    QuotientD1 { a: String, b: String },
    Energy { norm: String },
    EnergyDual { measure: String },
    MinimumNorm { norm: String },
    TAndS { xi: Vec<Q> },
    Biconjugate { norm: String },
    ActiveCells { norm: String },
}

pub const OPS: [&str; 18] = [
    "legendre",
    "vol",
    "lambda-max",
    "distance",
    "spectral-measure",
    "spectral-measure-truncated",
    "fs",
    "monge-ampere",
    "canonical-approximant",
    "round-down",
    "finite-type",
    "quotient-d1",
    "energy",
    "energy-dual",
    "minimum-norm",
    "t-s",
    "biconjugate",
    "active-cells",
];

#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub op_name: String,
    pub op: Op,
    pub output: String,
}

/// A validated scene with constructed objects.
#[derive(Clone, Debug)]
pub struct Scene {
    pub polytope: RationalPolytope,
    pub norms: BTreeMap<String, NormObject>,
    pub measures: BTreeMap<String, DiscreteMeasure<Vec<Q>>>,
    pub tasks: Vec<Task>,
}

pub fn parse(text: &str) -> Result<Scene, String> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| format!("malformed scene: {e}"))?;
    build(file)
}

pub fn build(file: SceneFile) -> Result<Scene, String> {
    if file.version != VERSION {
        return Err(format!("unsupported scene version {:?} (expected {VERSION:?})", file.version));
    }
    let polytope = RationalPolytope::from_vertices(file.polytope.vertices.into_iter().map(|p| p.0).collect())
        .map_err(|e| format!("polytope: {e}"))?;
    let mut norms = BTreeMap::new();
    for (name, spec) in file.norms {
        let obj = build_norm(&polytope, spec).map_err(|e| format!("norm {name:?}: {e}"))?;
        norms.insert(name, obj);
    }
    for (name, mu) in &file.measures {
        if let Some((a, _)) = mu.atoms().find(|(a, _)| a.len() != polytope.dim()) {
            return Err(format!("measure {name:?}: atom of dimension {} in a dimension-{} scene", a.len(), polytope.dim()));
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut tasks = Vec::new();
    for spec in file.tasks {
        if !seen.insert(spec.name.clone()) {
            return Err(format!("duplicate task name {:?}", spec.name));
        }
        let op = parse_op(&spec, &norms, &file.measures, polytope.dim()).map_err(|e| format!("task {:?}: {e}", spec.name))?;
        tasks.push(Task { name: spec.name, op_name: spec.op, op, output: spec.output });
    }
    Ok(Scene { polytope, norms, measures: file.measures, tasks })
}

fn build_norm(p: &RationalPolytope, spec: NormSpec) -> Result<NormObject, String> {
    let e = |x: filtra::Error| x.to_string();
    Ok(match spec {
        NormSpec::PlMin { pieces } => NormObject::Hom(ToricHomNorm::divisorial(p.clone(), pieces).map_err(e)?),
        NormSpec::Valuation { xi } => NormObject::Hom(ToricHomNorm::from_valuation(p.clone(), xi.0).map_err(e)?),
        NormSpec::Trivial => NormObject::Hom(ToricHomNorm::trivial(p.clone())),
        NormSpec::Truncated { base_degree, bound, levels } => {
            let mut table = BTreeMap::new();
            for (key, entries) in levels {
                let m: u32 = key.parse().map_err(|_| format!("level key {key:?} is not a degree"))?;
                let mut level = BTreeMap::new();
                for t in entries {
                    if level.insert(t.point.clone(), t.value.0).is_some() {
                        return Err(format!("level {m} lists {:?} twice", t.point));
                    }
                }
                table.insert(m, level);
            }
            NormObject::Truncated(TruncatedToricNorm::new(p.clone(), base_degree, bound.0, table).map_err(e)?)
        }
        NormSpec::Sampled { pitch, polynomial, grid } => {
            let source = match (polynomial, grid) {
                (Some(terms), None) => SampleSource::Polynomial(Poly::from_terms(
                    p.dim(),
                    terms.into_iter().map(|t| {
                        if t.exponent.len() != p.dim() {
                            Err(format!("exponent {:?} has the wrong length", t.exponent))
                        } else {
                            Ok((t.exponent, t.coef.0))
                        }
                    }).collect::<Result<Vec<_>, _>>()?,
                )),
                (None, Some(entries)) => {
                    let mut g = BTreeMap::new();
                    for t in entries {
                        if g.insert(t.point.clone(), t.value.0).is_some() {
                            return Err(format!("grid lists {:?} twice", t.point));
                        }
                    }
                    SampleSource::Grid(g)
                }
                _ => return Err("sampled norms need exactly one of \"polynomial\" or \"grid\"".into()),
            };
            NormObject::Hom(ToricHomNorm::sampled(p.clone(), pitch, source).map_err(e)?)
        }
    })
}

fn parse_op(
    spec: &TaskSpec,
    norms: &BTreeMap<String, NormObject>,
    measures: &BTreeMap<String, DiscreteMeasure<Vec<Q>>>,
    dim: usize,
) -> Result<Op, String> {
    let known: &[&str] = match spec.op.as_str() {
        "distance" => &["a", "b", "p"],
        "quotient-d1" => &["a", "b"],
        "spectral-measure-truncated" => &["norm", "m"],
        "fs" => &["norm", "xi"],
        "canonical-approximant" => &["norm", "d"],
        "energy-dual" => &["measure"],
        "t-s" => &["xi"],
        op if OPS.contains(&op) => &["norm"],
        op => return Err(format!("unknown op {op:?}")),
    };
    if let Some(k) = spec.args.keys().find(|k| !known.contains(&k.as_str())) {
        return Err(format!("unexpected argument {k:?}"));
    }
    let args = &spec.args;
    let string = |key: &str| -> Result<String, String> {
        args.get(key).and_then(Value::as_str).map(str::to_string).ok_or_else(|| format!("missing string argument {key:?}"))
    };
    let hom = |key: &str| -> Result<String, String> {
        let n = string(key)?;
        match norms.get(&n) {
            Some(NormObject::Hom(_)) => Ok(n),
            Some(NormObject::Truncated(_)) => Err(format!("norm {n:?} is truncated; this op needs a homogeneous norm")),
            None => Err(format!("unknown norm {n:?}")),
        }
    };
    let truncated = |key: &str| -> Result<String, String> {
        let n = string(key)?;
        match norms.get(&n) {
            Some(NormObject::Truncated(_)) => Ok(n),
            Some(NormObject::Hom(_)) => Err(format!("norm {n:?} is not truncated")),
            None => Err(format!("unknown norm {n:?}")),
        }
    };
    let any = |key: &str| -> Result<String, String> {
        let n = string(key)?;
        norms.contains_key(&n).then_some(n.clone()).ok_or_else(|| format!("unknown norm {n:?}"))
    };
    let degree = |key: &str| -> Result<u32, String> {
        args.get(key)
            .and_then(Value::as_u64)
            .and_then(|v| u32::try_from(v).ok())
            .filter(|v| *v > 0)
            .ok_or_else(|| format!("argument {key:?} must be a positive integer"))
    };
    let point = |key: &str| -> Result<Vec<Q>, String> {
        let v = args.get(key).ok_or_else(|| format!("missing argument {key:?}"))?;
        let p: Point = serde_json::from_value(v.clone()).map_err(|e| format!("argument {key:?}: {e}"))?;
        if p.0.len() != dim {
            return Err(format!("argument {key:?} has dimension {}, expected {dim}", p.0.len()));
        }
        Ok(p.0)
    };
    Ok(match spec.op.as_str() {
        "legendre" => Op::Legendre { norm: hom("norm")? },
        "vol" => Op::Vol { norm: hom("norm")? },
        "lambda-max" => Op::LambdaMax { norm: hom("norm")? },
        "distance" => {
            let p = match args.get("p") {
                Some(Value::String(s)) => Exponent::parse(s).map_err(|e| e.to_string())?,
                Some(Value::Number(n)) => Exponent::parse(&n.to_string()).map_err(|e| e.to_string())?,
                _ => return Err("missing argument \"p\"".into()),
            };
            p.validate().map_err(|e| e.to_string())?;
            Op::Distance { a: hom("a")?, b: hom("b")?, p }
        }
        "spectral-measure" => Op::SpectralMeasure { norm: hom("norm")? },
        "spectral-measure-truncated" => Op::SpectralMeasureTruncated { norm: truncated("norm")?, m: degree("m")? },
        "fs" => Op::Fs { norm: hom("norm")?, xi: point("xi")? },
        "monge-ampere" => Op::MongeAmpere { norm: hom("norm")? },
        "canonical-approximant" => Op::CanonicalApproximant { norm: any("norm")?, d: degree("d")? },
        "round-down" => Op::RoundDown { norm: truncated("norm")? },
        "finite-type" => Op::FiniteType { norm: hom("norm")? },
        "quotient-d1" => Op::QuotientD1 { a: hom("a")?, b: hom("b")? },
        "energy" => Op::Energy { norm: hom("norm")? },
        "energy-dual" => {
            let m = string("measure")?;
            if !measures.contains_key(&m) {
                return Err(format!("unknown measure {m:?}"));
            }
            Op::EnergyDual { measure: m }
        }
        "minimum-norm" => Op::MinimumNorm { norm: hom("norm")? },
        "t-s" => Op::TAndS { xi: point("xi")? },
        "biconjugate" => Op::Biconjugate { norm: hom("norm")? },
        "active-cells" => Op::ActiveCells { norm: hom("norm")? },
        _ => unreachable!("op names checked above"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_schema_matches() {
        let text = include_str!("../../../docs/scene.schema.json");
        let schema: Value = serde_json::from_str(text).unwrap();
        assert_eq!(schema["properties"]["version"]["const"], VERSION);
        let ops: Vec<&str> = schema["$defs"]["task"]["properties"]["op"]["enum"]
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_str().unwrap())
            .collect();
        assert_eq!(ops, OPS);
    }
}
