use std::fs;
use std::path::{Path, PathBuf};

use contextuality_cli::{run, EXIT_DOMAIN, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

const DELTA: &str = r#"{"vertices":["a","b","c"],"edges":[["a","b"],["b","c"],["a","c"]]}"#;
const DELTA3: &str =
    r#"{"vertices":["0","1","2","3","4","5"],"edges":[["0","1","2"],["1","3","4"],["2","4","5"]]}"#;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

impl Outcome {
    fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("stdout is JSON")
    }
}

fn cli(args: &[&str]) -> Outcome {
    cli_env(args, None)
}

fn cli_env(args: &[&str], env: Option<&str>) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["contextuality"];
    argv.extend_from_slice(args);
    let code = run(argv, env, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn models_of_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let delta = write(dir.path(), "delta.json", DELTA);
    let o = cli(&["models", s(&delta)]);
    assert_eq!(o.code, EXIT_OK);
    let v = o.json();
    assert_eq!(v["vertices"].as_array().unwrap().len(), 1);
    for l in ["a", "b", "c"] {
        assert_eq!(v["vertices"][0]["weights"][l], "1/2");
    }
    assert_eq!(v["complete"], true);
}

#[test]
fn embed_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let d3 = write(dir.path(), "d3.json", DELTA3);
    let emb = dir.path().join("emb.json");
    let o = cli(&["embed", "--construction", "theorem41", s(&d3), "--output", s(&emb)]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert!(o.stdout.is_empty());
    let o = cli(&["verify-conditional", s(&d3), s(&emb)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.json()["verdict"], "Verified");

    // Swap the images of two vertices from different edges.
    let mut e: Value = serde_json::from_str(&fs::read_to_string(&emb).unwrap()).unwrap();
    let inj = e["injection"].as_object_mut().unwrap();
    let (a, b) = (inj["0"].clone(), inj["3"].clone());
    inj.insert("0".into(), b);
    inj.insert("3".into(), a);
    e.as_object_mut().unwrap().remove("edge_choice");
    let bad = write(dir.path(), "bad.json", &e.to_string());
    let o = cli(&["verify-conditional", s(&d3), s(&bad)]);
    assert_eq!(o.code, EXIT_DOMAIN);
    let v = o.json();
    assert_eq!(v["verdict"], "Refuted");
    assert_eq!(v["counterexample"]["direction"], "restriction");
}

#[test]
fn graph_embedding_cli() {
    let dir = tempfile::tempdir().unwrap();
    let delta = write(dir.path(), "delta.json", DELTA);
    let o = cli(&["embed", "--construction", "graph", s(&delta)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.json()["kind"], "graph_oddcycle");
    let emb = write(dir.path(), "emb.json", &o.stdout);
    assert_eq!(cli(&["verify-conditional", s(&delta), s(&emb)]).code, EXIT_OK);
}

#[test]
fn broken_scenario_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", r#"{"vertices":["a","b","c"],"edges":[["a","b"]]}"#);
    let o = cli(&["validate", s(&broken)]);
    assert_eq!(o.code, EXIT_DOMAIN);
    assert_eq!(o.json()["error"], "IsolatedVertex");
    let garbage = write(dir.path(), "garbage.json", "[1,2");
    assert_eq!(cli(&["validate", s(&garbage)]).json()["error"], "Parse");
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&[]).code, EXIT_USAGE);
    let o = cli(&["validate", "/definitely/not/here.json"]);
    assert_eq!(o.code, EXIT_USAGE);
    assert!(o.stderr.contains("cannot read"));
    assert_eq!(cli(&["product", "--party", "2"]).code, EXIT_USAGE);
    assert_eq!(cli(&["models", "x.json", "--format", "xml"]).code, EXIT_USAGE);
    let help = cli(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("verify-conditional"));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d3 = write(dir.path(), "d3.json", DELTA3);
    for args in [
        vec!["models", s(&d3)],
        vec!["reduce", s(&d3)],
        vec!["embed", s(&d3)],
        vec!["product", "--party", "2x2", "--party", "2x2"],
    ] {
        let a = cli(&args);
        let b = cli(&args);
        assert_eq!(a.code, EXIT_OK);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn budgets_fail_loudly() {
    let dir = tempfile::tempdir().unwrap();
    let d3 = write(dir.path(), "d3.json", DELTA3);
    let o = cli_env(&["models", s(&d3)], Some("4"));
    assert_eq!(o.code, EXIT_DOMAIN);
    assert_eq!(o.json()["error"], "BudgetExceeded");
    let o = cli_env(&["models", s(&d3), "--vertex-budget", "10"], Some("4"));
    assert_eq!(o.code, EXIT_OK);
    let o = cli(&["product", "--party", "2x2", "--party", "2x2", "--edge-budget", "3"]);
    assert_eq!(o.json()["error"], "SizeBudgetExceeded");
    assert_eq!(cli_env(&["corpus"], Some("nonsense=1")).code, EXIT_USAGE);
}

#[test]
fn products_games_and_signaling() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(&["product", "--party", "2x2", "--party", "2x2"]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.json()["edges"].as_array().unwrap().len(), 12);
    let product = write(dir.path(), "p.json", &o.stdout);

    let o = cli(&["game", s(&product), "--builtin", "chsh"]);
    assert_eq!(o.code, EXIT_OK);
    let game = write(dir.path(), "game.json", &o.stdout);
    let o = cli(&["models", s(&game)]);
    let points = o.json()["vertices"].as_array().unwrap().clone();
    assert_eq!(points.len(), 1);
    assert!(points[0]["weights"].as_object().unwrap().values().all(|w| w == "1/2"));

    let mut rule = serde_json::Map::new();
    for q in ["0,0", "0,1", "1,0", "1,1"] {
        rule.insert(q.into(), Value::Array(vec![]));
    }
    rule.insert("0,0".into(), serde_json::json!(["00|00"]));
    let rule_path = write(dir.path(), "rule.json", &Value::Object(rule).to_string());
    let o = cli(&["game", s(&product), "--rule", s(&rule_path)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.json()["vertices"], serde_json::json!(["00|00"]));

    // Alice answers Bob's question: every question is normalized, yet Bob signals.
    let mut weights = serde_json::Map::new();
    for a in 0..2 {
        for b in 0..2 {
            for x in 0..2 {
                for y in 0..2 {
                    let w = if a == y && b == 0 { "1" } else { "0" };
                    weights.insert(format!("{a}{b}|{x}{y}"), w.into());
                }
            }
        }
    }
    let model = write(dir.path(), "m.json", &serde_json::json!({ "weights": weights }).to_string());
    let o = cli(&["check-ns", s(&product), s(&model)]);
    assert_eq!(o.code, EXIT_DOMAIN);
    let v = o.json();
    assert_eq!(v["no_signaling"], false);
    assert_eq!(v["violations"][0]["party"], 1);

    let mut uniform = serde_json::Map::new();
    for k in weights.keys() {
        uniform.insert(k.clone(), "1/4".into());
    }
    let model = write(dir.path(), "u.json", &serde_json::json!({ "weights": uniform }).to_string());
    assert_eq!(cli(&["check-ns", s(&product), s(&model)]).code, EXIT_OK);
}

#[test]
fn reduce_and_equivalence() {
    let dir = tempfile::tempdir().unwrap();
    let nested = write(
        dir.path(),
        "nested.json",
        r#"{"vertices":["a","b","c","m"],"edges":[["a","b"],["b","c"],["a","m","b"]]}"#,
    );
    let o = cli(&["reduce", s(&nested)]);
    assert_eq!(o.code, EXIT_OK);
    let v = o.json();
    assert_eq!(v["vertex_map"]["m"], Value::Null);
    assert_eq!(v["reduced"]["vertices"], serde_json::json!(["a", "b", "c"]));
    let reduced = write(dir.path(), "reduced.json", &v["reduced"].to_string());
    let path = write(dir.path(), "path.json", r#"{"vertices":["x","y","z"],"edges":[["x","y"],["y","z"]]}"#);
    let o = cli(&["reduce", s(&reduced), "--equivalent", s(&path)]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.json()["equivalent"], true);
    let delta = write(dir.path(), "delta.json", DELTA);
    assert_eq!(cli(&["reduce", s(&delta), "--equivalent", s(&path)]).code, EXIT_DOMAIN);

    let o = cli(&["validate", s(&nested)]);
    assert_eq!(o.json()["nested_edges"].as_array().unwrap().len(), 1);
}

#[test]
fn membership_checks() {
    let dir = tempfile::tempdir().unwrap();
    let delta = write(dir.path(), "delta.json", DELTA);
    let half = write(dir.path(), "half.json", r#"{"weights":{"a":"1/2","b":"1/2","c":"1/2"}}"#);
    let o = cli(&["models", s(&delta), "--check", s(&half)]);
    assert_eq!(o.code, EXIT_OK);
    let v = o.json();
    assert_eq!(v["probabilistic"], true);
    assert_eq!(v["classical"], false);
    assert_eq!(v["consistent_exclusivity"], false);
    let o = cli(&["models", s(&delta), "--deterministic"]);
    assert_eq!(o.json(), serde_json::json!([]));
}

#[test]
fn corpus_runs() {
    let o = cli(&["corpus", "--format", "table"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(o.stdout.lines().all(|l| l.starts_with("PASS")));

    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "wrong.json",
        r#"{"name":"wrong","scenario":{"vertices":["a","b"],"edges":[["a","b"]]},"expected":{"extreme_point_count":5}}"#,
    );
    let o = cli(&["corpus", s(dir.path())]);
    assert_eq!(o.code, EXIT_DOMAIN);
    assert_eq!(o.json()["error"], "FixtureMismatch");
}
