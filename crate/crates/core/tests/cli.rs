use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn unigen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unigen")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout={} stderr={}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
    })
}

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let w = Workspace {
            dir: tempfile::tempdir().unwrap(),
        };
        let out = unigen(&["demo", "all", "--out-dir", w.s(w.dir.path())]);
        assert_eq!(code(&out), 0);
        w
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn p(&self, name: &str) -> String {
        self.path(name).display().to_string()
    }

    fn s<'a>(&self, p: &'a Path) -> &'a str {
        p.to_str().unwrap()
    }

    fn write(&self, name: &str, text: &str) -> String {
        std::fs::write(self.path(name), text).unwrap();
        self.p(name)
    }
}

const HADAMARD: &str = r#"{"matrix":[[[0,-0.7071067811865476],[0,-0.7071067811865476]],[[0,-0.7071067811865476],[0,0.7071067811865476]]]}"#;
const IDENTITY2: &str = r#"{"matrix":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#;
const COMMUTING: &str = r#"{"dim":3,"structure":"skew_hermitian","expected_algebra_dim":8,"generators":[
  [[[0,1],[0,0],[0,0]],[[0,0],[0,-1],[0,0]],[[0,0],[0,0],[0,0]]],
  [[[0,0],[0,0],[0,0]],[[0,0],[0,1],[0,0]],[[0,0],[0,0],[0,-1]]]]}"#;

#[test]
fn validate_exit_codes() {
    let w = Workspace::new();
    for (name, dim) in [("su2_pauli_pair", 3), ("su3_gellmann_pair", 8), ("so3_rotations", 3)] {
        let o = unigen(&["validate", &w.p(&format!("{name}.json"))]);
        assert_eq!(code(&o), 0, "{name}");
        let r = report(&o);
        assert_eq!(r["results"]["closure_dim"], dim);
        assert_eq!(r["results"]["generating"], true);
    }

    let commuting = w.write("commuting.json", COMMUTING);
    let o = unigen(&["validate", &commuting]);
    assert_eq!(code(&o), 3);
    assert_eq!(report(&o)["results"]["generating"], false);
    assert_eq!(report(&o)["results"]["closure_dim"], 2);

    let bad = w.write("bad.json", "{\"dim\": 2,\n  \"structure\": ");
    let o = unigen(&["validate", &bad]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let o = unigen(&["validate", &w.p("missing.json")]);
    assert_eq!(code(&o), 1);
}

#[test]
fn field_errors_name_the_generator() {
    let w = Workspace::new();
    let p = w.write(
        "hermitian.json",
        r#"{"dim":2,"structure":"skew_hermitian","generators":[[[[0,0],[1,0]],[[-1,0],[0,0]]],[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#,
    );
    let o = unigen(&["validate", &p]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("generators[1]"));
}

#[test]
fn bound_command() {
    let o = unigen(&["bound", "--n", "3", "--m", "2"]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["results"]["values"], serde_json::json!([1]));
    assert_eq!(r["results"]["bound"], 5);

    let r = report(&unigen(&["bound", "--n", "8", "--m", "2"]));
    assert_eq!(r["results"]["values"], serde_json::json!([1, 2, 5, 10, 21, 42]));
    assert_eq!(r["results"]["bound"], 170);

    let r = report(&unigen(&["bound", "--n", "4", "--m", "4"]));
    assert_eq!(r["results"]["bound"], 4);

    assert_eq!(code(&unigen(&["bound", "--n", "2", "--m", "3"])), 2);
    assert_eq!(code(&unigen(&["bound", "--n", "2"])), 2);

    let w = Workspace::new();
    let r = report(&unigen(&["bound", &w.p("su3_gellmann_pair.json")]));
    assert_eq!(r["results"]["bound"], 170);
}

#[test]
fn complete_writes_a_reloadable_basis() {
    let w = Workspace::new();
    let out = w.p("basis.json");
    let o = unigen(&["complete", &w.p("so3_rotations.json"), "--out", &out]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    assert_eq!(r["results"]["n"], 3);
    assert!(r["results"]["max_reproduction_error"].as_f64().unwrap() <= 1e-9);
    let text = std::fs::read_to_string(&out).unwrap();
    let file: unigen::io::BasisFile = unigen::io::parse_str(&text, "basis").unwrap();
    let basis = file.to_basis(&unigen::Tolerances::default()).unwrap();
    assert_eq!(basis.n(), 3);

    let commuting = w.write("commuting.json", COMMUTING);
    assert_eq!(code(&unigen(&["complete", &commuting])), 3);
}

#[test]
fn synthesize_verify_round_trip() {
    let w = Workspace::new();
    let problem = w.p("su2_pauli_pair.json");
    let target = w.write("hadamard.json", HADAMARD);
    let cache = w.p("net.json");
    let word = w.p("word.json");

    let o = unigen(&[
        "synthesize", &problem, &target, "--net-cache", &cache, "--word-out", &word, "--seed", "3", "--tol", "1e-6",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&o);
    assert_eq!(r["results"]["net_source"], "built");
    let t = &r["results"]["targets"][0];
    assert!(t["error"].as_f64().unwrap() <= 1e-6);
    let net_max = r["results"]["net"]["max_word_length"].as_u64().unwrap();
    assert!(t["length"].as_u64().unwrap() <= net_max + 5);
    assert_eq!(t["within_bound"], true);

    let o = unigen(&["verify", &word, &problem, &target]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));

    // A perturbed time fails verification.
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(&word).unwrap()).unwrap();
    let letters = doc["word"]["letters"].as_array_mut().unwrap();
    let t0 = letters[0][1].as_f64().unwrap();
    letters[0][1] = serde_json::json!(t0 + 0.1);
    let bad = w.write("bad_word.json", &doc.to_string());
    let o = unigen(&["verify", &bad, &problem, &target]);
    assert_eq!(code(&o), 7);
    assert_eq!(report(&o)["results"]["ok"], false);

    // The second run reuses the cache and emits the same word.
    let word2 = w.p("word2.json");
    let o = unigen(&[
        "synthesize", &problem, &target, "--net-cache", &cache, "--word-out", &word2, "--seed", "3", "--tol", "1e-6",
    ]);
    assert_eq!(report(&o)["results"]["net_source"], "cache");
    assert_eq!(std::fs::read(&word).unwrap(), std::fs::read(&word2).unwrap());

    // Nonnegative variant.
    let nonneg = w.p("nonneg.json");
    let o = unigen(&[
        "synthesize", &problem, &target, "--net-cache", &cache, "--word-out", &nonneg, "--seed", "3", "--tol", "1e-6",
        "--nonneg",
    ]);
    assert_eq!(code(&o), 0);
    let r = report(&o);
    let n = &r["results"]["targets"][0]["nonneg"];
    assert!(n["min_time"].is_null() || n["min_time"].as_f64().unwrap() >= 0.0);
    assert!(n["error"].as_f64().unwrap() <= 1e-6);
    let o = unigen(&["verify", &nonneg, &problem, &target]);
    assert_eq!(code(&o), 0);
}

#[test]
fn identity_target_and_empty_word() {
    let w = Workspace::new();
    let problem = w.p("su2_pauli_pair.json");
    let target = w.write("id.json", IDENTITY2);
    let word = w.p("w.json");
    let o = unigen(&["synthesize", &problem, &target, "--word-out", &word, "--radius", "0.6"]);
    assert_eq!(code(&o), 0);
    assert_eq!(report(&o)["results"]["targets"][0]["length"], 0);

    let empty = w.write(
        "empty.json",
        r#"{"word":{"letters":[],"meta":{"length":0,"bound_used":0,"product_error":0.0}},"stated_error":0.0,"nonnegative":true}"#,
    );
    assert_eq!(code(&unigen(&["verify", &empty, &problem, &target])), 0);
}

#[test]
fn batch_targets() {
    let w = Workspace::new();
    let problem = w.p("so3_rotations.json");
    let target = w.write(
        "batch.json",
        r#"{"matrices":[
          [[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[1,0]]],
          [[[0,0],[-1,0],[0,0]],[[1,0],[0,0],[0,0]],[[0,0],[0,0],[1,0]]],
          [[[1,0],[0,0],[0,0]],[[0,0],[-1,0],[0,0]],[[0,0],[0,0],[-1,0]]]]}"#,
    );
    let words = w.p("words.json");
    let o = unigen(&["synthesize", &problem, &target, "--word-out", &words, "--radius", "0.45", "--seed", "1"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&o)["results"]["targets"].as_array().unwrap().len(), 3);
    assert_eq!(code(&unigen(&["verify", &words, &problem, &target])), 0);
}

#[test]
fn bad_targets_are_input_errors() {
    let w = Workspace::new();
    let problem = w.p("su2_pauli_pair.json");
    let not_unitary = w.write("nu.json", r#"{"matrix":[[[2,0],[0,0]],[[0,0],[1,0]]]}"#);
    assert_eq!(code(&unigen(&["synthesize", &problem, &not_unitary])), 2);
    let wrong_dim = w.write("wd.json", r#"{"matrix":[[[1,0]]]}"#);
    assert_eq!(code(&unigen(&["synthesize", &problem, &wrong_dim])), 2);
    assert_eq!(code(&unigen(&["frobnicate"])), 2);
    assert_eq!(code(&unigen(&["demo", "su9"])), 2);
}

#[test]
fn coverage_failure_exit_code() {
    let w = Workspace::new();
    let problem = w.p("su2_pauli_pair.json");
    let o = unigen(&["net", &problem, "--radius", "0.05", "--max-points", "300", "--validation-samples", "50"]);
    assert_eq!(code(&o), 5);
}
