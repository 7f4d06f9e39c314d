use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn filtra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filtra")).args(args).output().expect("binary runs")
}

fn segment_scene(tasks: Value) -> Value {
    json!({
        "version": "1",
        "polytope": { "vertices": [["0"], ["1"]] },
        "norms": {
            "g": { "kind": "pl-min", "pieces": [
                { "slope": ["1"], "const": "0" },
                { "slope": ["0"], "const": "1/3" }
            ] },
            "triv": { "kind": "trivial" },
            "h": { "kind": "truncated", "base_degree": 1, "bound": "1", "levels": {
                "1": [ { "point": [0], "value": "1/2" }, { "point": [1], "value": "1" } ],
                "2": [ { "point": [0], "value": "1" }, { "point": [1], "value": "3/2" }, { "point": [2], "value": "2" } ]
            } }
        },
        "measures": {
            "mu": { "atoms": [ { "atom": ["0"], "mass": "1/2" }, { "atom": ["1"], "mass": "1/2" } ] }
        },
        "tasks": tasks
    })
}

fn write_scene(dir: &Path, scene: &Value) -> PathBuf {
    let path = dir.join("scene.json");
    fs::write(&path, serde_json::to_string_pretty(scene).unwrap()).unwrap();
    path
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn run_ok(scene: &Path, extra: &[&str]) {
    let mut args = vec!["run", scene.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = filtra(&args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn legendre_pieces() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([{ "name": "leg", "op": "legendre", "args": { "norm": "g" }, "output": "leg.json" }])),
    );
    run_ok(&scene, &[]);
    let v = read_json(&dir.path().join("leg.json"));
    assert_eq!(v["task"], "leg");
    assert_eq!(v["op"], "legendre");
    assert_eq!(
        v["result"],
        json!([
            { "slope": "1", "const": "1/3" },
            { "slope": "1/3", "const": "1/3" },
            { "slope": "0", "const": "0" }
        ])
    );
}

#[test]
fn trivial_volume_is_zero() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([{ "name": "v", "op": "vol", "args": { "norm": "triv" }, "output": "vol.json" }])),
    );
    run_ok(&scene, &[]);
    assert_eq!(read_json(&dir.path().join("vol.json"))["result"], json!("0"));
}

#[test]
fn energy_dual_two_diracs() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([{ "name": "e", "op": "energy-dual", "args": { "measure": "mu" }, "output": "e.json" }])),
    );
    run_ok(&scene, &[]);
    let v = read_json(&dir.path().join("e.json"));
    let value: f64 = v["result"]["value"].as_str().unwrap().parse().unwrap();
    assert!((value - 0.125).abs() <= 1e-8, "{value}");
    let sol = &v["result"]["solution"];
    assert!(sol["residual"].as_f64().unwrap() <= 1e-6);
    assert!(sol["iterations"].is_u64());
}

#[test]
fn distance_and_min_norm_values() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([
            { "name": "d1", "op": "distance", "args": { "a": "g", "b": "triv", "p": 1 }, "output": "d1.json" },
            { "name": "dinf", "op": "distance", "args": { "a": "g", "b": "triv", "p": "inf" }, "output": "dinf.json" },
            { "name": "mn", "op": "minimum-norm", "args": { "norm": "g" }, "output": "mn.json" }
        ])),
    );
    run_ok(&scene, &[]);
    // integral of min(a, 1/3) over [0,1] is 1/18 + 2/9
    assert_eq!(read_json(&dir.path().join("d1.json"))["result"]["powered"], json!("5/18"));
    assert_eq!(read_json(&dir.path().join("dinf.json"))["result"]["value"], json!("1/3"));
    // the flat piece carries mass 2/3 at height 1/3
    assert_eq!(read_json(&dir.path().join("mn.json"))["result"]["value"], json!("1/18"));
}

#[test]
fn output_is_deterministic() {
    let tasks = json!([
        { "name": "cdf", "op": "spectral-measure", "args": { "norm": "g" }, "output": "cdf.json" },
        { "name": "e", "op": "energy-dual", "args": { "measure": "mu" }, "output": "e.json" },
        { "name": "ma", "op": "monge-ampere", "args": { "norm": "g" }, "output": "ma.json" }
    ]);
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let sa = write_scene(a.path(), &segment_scene(tasks.clone()));
    let sb = write_scene(b.path(), &segment_scene(tasks));
    run_ok(&sa, &["--csv"]);
    run_ok(&sb, &["--csv"]);
    for f in ["cdf.json", "cdf.csv", "e.json", "ma.json", "ma.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f} differs");
    }
}

#[test]
fn csv_tables() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([
            { "name": "cdf", "op": "spectral-measure", "args": { "norm": "g" }, "output": "cdf.json" },
            { "name": "ma", "op": "monge-ampere", "args": { "norm": "g" }, "output": "ma.json" }
        ])),
    );
    run_ok(&scene, &[]);
    assert!(!dir.path().join("cdf.csv").exists());
    run_ok(&scene, &["--csv"]);
    let cdf = fs::read_to_string(dir.path().join("cdf.csv")).unwrap();
    let mut lines = cdf.lines();
    assert_eq!(lines.next(), Some("t,cdf"));
    assert!(lines.any(|l| l == "1/3,1"));
    let ma = fs::read_to_string(dir.path().join("ma.csv")).unwrap();
    assert!(ma.lines().count() >= 3, "{ma}");
    assert!(ma.contains("2/3") && ma.contains("1/3"), "{ma}");
}

#[test]
fn pl_output_reads_back_as_norm() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([{ "name": "bi", "op": "biconjugate", "args": { "norm": "g" }, "output": "bi.json" }])),
    );
    run_ok(&scene, &[]);
    let norm = read_json(&dir.path().join("bi.json"))["result"].clone();
    assert_eq!(norm["kind"], "pl-min");

    let mut second = segment_scene(json!([
        { "name": "d", "op": "distance", "args": { "a": "g", "b": "back", "p": "inf" }, "output": "d.json" }
    ]));
    second["norms"]["back"] = norm;
    let sub = dir.path().join("again");
    fs::create_dir(&sub).unwrap();
    let s2 = write_scene(&sub, &second);
    run_ok(&s2, &[]);
    assert_eq!(read_json(&sub.join("d.json"))["result"]["value"], json!("0"));
}

#[test]
fn truncated_output_reads_back() {
    let dir = TempDir::new().unwrap();
    let scene = write_scene(
        dir.path(),
        &segment_scene(json!([{ "name": "r", "op": "round-down", "args": { "norm": "h" }, "output": "r.json" }])),
    );
    run_ok(&scene, &[]);
    let rounded = read_json(&dir.path().join("r.json"))["result"].clone();
    assert_eq!(rounded["bound"], "2");
    assert_eq!(rounded["levels"]["1"][0]["value"], "0");

    let mut second = segment_scene(json!([
        { "name": "sm", "op": "spectral-measure-truncated", "args": { "norm": "hr", "m": 2 }, "output": "sm.json" }
    ]));
    second["norms"]["hr"] = rounded;
    let sub = dir.path().join("again");
    fs::create_dir(&sub).unwrap();
    let s2 = write_scene(&sub, &second);
    run_ok(&s2, &[]);
    assert!(read_json(&sub.join("sm.json"))["result"]["atoms"].is_array());
}

#[test]
fn malformed_scene_exits_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ not json").unwrap();
    assert_eq!(filtra(&["run", path.to_str().unwrap()]).status.code(), Some(1));

    let mut scene = segment_scene(json!([{ "name": "x", "op": "vol", "args": { "norm": "nope" }, "output": "x.json" }]));
    let path = write_scene(dir.path(), &scene);
    let out = filtra(&["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    scene["version"] = json!("99");
    scene["tasks"] = json!([]);
    let path = write_scene(dir.path(), &scene);
    assert_eq!(filtra(&["run", path.to_str().unwrap()]).status.code(), Some(1));

    assert_eq!(filtra(&["run", "/definitely/missing.json"]).status.code(), Some(1));
    assert_eq!(filtra(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn failing_task_exits_two() {
    let dir = TempDir::new().unwrap();
    // 1/3 is off the 1/2 lattice, so the approximant is undefined
    let scene = write_scene(
        dir.path(),
        &json!({
            "version": "1",
            "polytope": { "vertices": [["0"], ["1/3"]] },
            "norms": { "t": { "kind": "trivial" } },
            "tasks": [
                { "name": "ok", "op": "vol", "args": { "norm": "t" }, "output": "ok.json" },
                { "name": "bad", "op": "canonical-approximant", "args": { "norm": "t", "d": 2 }, "output": "bad.json" }
            ]
        }),
    );
    let out = filtra(&["run", scene.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("ok.json").exists());
    assert!(!dir.path().join("bad.json").exists());
}

#[test]
fn selftest_filter_and_seed() {
    let out = filtra(&["selftest", "--filter", "fd", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("fd-identities"));
    assert!(!text.contains("ot-fixed-point"));
    assert!(text.contains("1/1 criteria passed (seed 7)"), "{text}");

    assert_eq!(filtra(&["selftest", "--filter", "no-such-criterion"]).status.code(), Some(1));
}

#[test]
fn shipped_example_runs() {
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples/segment.json");
    let dir = TempDir::new().unwrap();
    let scene = dir.path().join("segment.json");
    fs::copy(&src, &scene).unwrap();
    run_ok(&scene, &["--csv"]);
    assert_eq!(read_json(&dir.path().join("out/d2.json"))["result"]["powered"], json!("7/81"));
    assert_eq!(read_json(&dir.path().join("out/ts.json"))["result"], json!({ "S": "1/2", "T": "1" }));
}
