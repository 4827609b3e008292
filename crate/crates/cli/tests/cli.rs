use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn freelip(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_freelip"));
    for a in args {
        if a.ends_with(".json") && !a.contains('/') {
            cmd.arg(fixture(a));
        } else {
            cmd.arg(a);
        }
    }
    cmd.output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn validate_reports_every_violation() {
    let ok = freelip(&["validate", "line3.json"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(report(&ok)["valid"], true);

    let bad = freelip(&["validate", "not_metric.json"]);
    assert_eq!(code(&bad), 1);
    let body = report(&bad);
    assert_eq!(body["valid"], false);
    let list = body["violations"].as_array().unwrap();
    assert_eq!(list, &[Value::from("d(x,z) > d(x,y) + d(y,z)")]);
}

#[test]
fn norm_of_two_point_masses_on_the_line() {
    let out = freelip(&["norm", "sum12.json"]);
    assert_eq!(code(&out), 0);
    let body = report(&out);
    assert_eq!(body["norm"], "3");
    let f = &body["dual_witness"];
    assert_eq!((f["1"].as_str(), f["2"].as_str()), (Some("1"), Some("2")));

    let dual = freelip(&["norm", "sum12.json", "--solver", "lipschitz-dual"]);
    assert_eq!(report(&dual)["norm"], "3");
}

#[test]
fn norm_of_zero_has_empty_witnesses() {
    let body = report(&freelip(&["norm", "zero.json"]));
    assert_eq!(body["norm"], "0");
    assert_eq!(body["dual_witness"], serde_json::json!({}));
    assert_eq!(body["primal_witness"], serde_json::json!([]));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&freelip(&["norm", "base_coeff.json"])), 2);
    assert_eq!(code(&freelip(&["norm", "missing.json"])), 2);
    assert_eq!(code(&freelip(&["norm", "sum12.json", "--solver", "nope"])), 2);
    assert_eq!(code(&freelip(&["norm", "not_metric.json"])), 2);
}

#[test]
fn parse_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"points":["a","b"],"base":"a","d":[["0","1"],["1","one"]]}"#).unwrap();
    let out = freelip(&["validate", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("d[1][1]"), "{err}");
}

#[test]
fn preorder_on_the_half_grid() {
    let out = freelip(&["preorder", "delta10.json", "nu.json"]);
    assert_eq!(code(&out), 0);
    let body = report(&out);
    assert_eq!(body["precedes"], true);
    assert_eq!(
        body["lambda"],
        serde_json::json!([{ "x": "1", "u": "1/2", "y": "0", "weight": "1" }])
    );

    let back = freelip(&["preorder", "nu.json", "delta10.json"]);
    assert_eq!(code(&back), 1);
    let body = report(&back);
    assert_eq!(body["precedes"], false);
    assert!(body["separator"].is_array());

    for (a, b, expected) in [("delta10.json", "nu.json", true), ("nu.json", "delta10.json", false)] {
        let body = report(&freelip(&["preorder", a, b, "--method", "bounded-dual-lp"]));
        assert_eq!(body["precedes"], expected);
    }
}

#[test]
fn minimal_and_represent() {
    let body = report(&freelip(&["minimal", "nu.json"]));
    assert_eq!(body["input_is_minimal"], false);
    assert_eq!(
        body["minimal"]["masses"],
        serde_json::json!([{ "x": "1", "y": "0", "m": "1" }])
    );

    let body = report(&freelip(&["represent", "delta1.json", "--minimal"]));
    assert_eq!(body["norm"], "1");
    assert_eq!(body["optimal"], true);
    assert_eq!(body["masses"], serde_json::json!([{ "x": "1", "y": "0", "m": "1" }]));
}

#[test]
fn emitted_measures_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = freelip(&["represent", "sum12.json"]);
    let path = dir.path().join("mu.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let again = freelip(&["minimal", path.to_str().unwrap()]);
    assert_eq!(code(&again), 0);
    let first = report(&out);
    let reparsed: Value = serde_json::from_str(&serde_json::to_string(&first).unwrap()).unwrap();
    assert_eq!(first, reparsed);
    let same = freelip(&["preorder", path.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(report(&same)["precedes"], true);
}

#[test]
fn extreme_with_oracle_on_the_line() {
    let out = freelip(&["extreme", "line3.json", "--oracle"]);
    assert_eq!(code(&out), 0);
    let body = report(&out);
    assert_eq!(body["summary"]["extreme"], 4);
    assert_eq!(body["summary"]["not_extreme"], 2);
    assert_eq!(body["summary"]["mismatches"], 0);

    let one = report(&freelip(&["extreme", "line3.json", "--pair", "2", "0"]));
    let row = &one["pairs"][0];
    assert_eq!(row["verdict"], "NotExtreme");
    assert_eq!(row["witness"]["between"], "1");

    let body = report(&freelip(&["extreme", "concave3.json", "--classifier", "vertex-oracle"]));
    assert_eq!(body["summary"]["extreme"], 6);
}

#[test]
fn decompose_and_diagonal() {
    let out = freelip(&["decompose", "delta1.json", "--parts", "split.json"]);
    assert_eq!(code(&out), 0);
    let body = report(&out);
    assert_eq!(body["additive"], true);
    assert_eq!(body["sum_of_norms"], "1");

    let body = report(&freelip(&["diagonal", "sum12.json"]));
    assert_eq!(body["diagonal"], serde_json::json!({}));
    assert_eq!(body["certificate_optimal"], true);
    assert_eq!(body["certificate_minimal"], true);
}

#[test]
fn dilations_between_concave_copies() {
    let out = freelip(&["dilations", "concave3.json", "concave3_scaled.json", "--verify"]);
    assert_eq!(code(&out), 0);
    let body = report(&out);
    assert_eq!(body["count"], 2);
    for d in body["dilations"].as_array().unwrap() {
        assert_eq!(d["factor"], "2");
        assert_eq!(d["map"]["b"], "q");
        assert_eq!(d["verification"]["passed"], true);
    }
    let none = freelip(&["dilations", "line3.json", "concave3.json"]);
    assert_eq!(code(&none), 1);
}

#[test]
fn gcheck_verdicts() {
    let ok = freelip(&["gcheck", "g_ones.json"]);
    assert_eq!(code(&ok), 0);
    assert_eq!(report(&ok)["in_cone"], true);

    let bad = freelip(&["gcheck", "g_bad.json"]);
    assert_eq!(code(&bad), 1);
    let v = &report(&bad)["violation"];
    assert_eq!((v["x"].as_str(), v["y"].as_str()), (Some("2"), Some("0")));
}

#[test]
fn corpus_is_reproducible() {
    let args = ["corpus", "--n", "5", "--count", "6", "--seed", "11", "--compact"];
    let a = freelip(&args);
    let b = freelip(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let body = report(&a);
    assert_eq!(body["summary"]["failures"], 0);
    assert_eq!(body["parameters"]["seed"], 11);
}

#[test]
fn strategies_are_listed() {
    let body = report(&freelip(&["strategies"]));
    let names: Vec<&str> = body["precedence"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["bounded-dual-lp", "triangle-moves"]);
}

#[test]
fn minimal_measures_below_a_fork_are_not_unique() {
    for below in ["fork_via2.json", "fork_via3.json"] {
        assert_eq!(report(&freelip(&["preorder", below, "fork_mu.json"]))["precedes"], true);
        assert_eq!(report(&freelip(&["minimal", below]))["input_is_minimal"], true);
    }
    assert_eq!(report(&freelip(&["preorder", "fork_via2.json", "fork_via3.json"]))["precedes"], false);
    assert_eq!(report(&freelip(&["preorder", "fork_via3.json", "fork_via2.json"]))["precedes"], false);
    let body = report(&freelip(&["minimal", "fork_mu.json"]));
    assert_eq!(
        body["minimal"]["masses"],
        serde_json::json!([{ "x": "2", "y": "1", "m": "1" }, { "x": "3", "y": "0", "m": "3" }])
    );
}
