use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn phs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phs"))
        .args(args)
        .env_remove("PHS_SEED")
        .output()
        .expect("phs runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "bad JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn distance_identical_and_orthogonal() {
    let dir = TempDir::new().unwrap();
    let a = write(
        &dir,
        "a.json",
        r#"{"dim": 2, "components": [[1, 0], [0, 0]]}"#,
    );
    let b = write(
        &dir,
        "b.json",
        r#"{"dim": 2, "components": [[0, 0], [0, 1]]}"#,
    );

    let out = phs(&["distance", "--in", s(&a), "--in", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["h"], 1.0);
    assert_eq!(v["rho_n"], 0.0);
    assert_eq!(v["rho_tr"], 0.0);

    let out = phs(&["distance", "--in", s(&a), "--in", s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["rho_n"], 1.0);
    assert_eq!(v["rho_tr"], 2.0);
}

#[test]
fn distance_against_oracle() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", "[[1, 0], [0, 0]]");
    let b = write(
        &dir,
        "b.csv",
        "index,re,im\n0,0.7071067811865476,0\n1,0,0.7071067811865476\n",
    );
    let out = phs(&["distance", "--in", s(&a), "--in", s(&b)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rho = v["rho_n"].as_f64().unwrap();
    assert!((rho - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    assert!((v["oracle_rho_n"].as_f64().unwrap() - rho).abs() < 1e-10);
    assert!(v["max_abs_diff"].as_f64().unwrap() < 1e-10);
}

#[test]
fn distance_errors() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", "[[1, 0], [0, 0]]");
    let c = write(&dir, "c.json", "[[1, 0], [0, 0], [0, 0]]");
    let bad = write(&dir, "bad.json", "{not json");
    assert_eq!(
        phs(&["distance", "--in", s(&a), "--in", s(&c)])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        phs(&["distance", "--in", s(&a), "--in", s(&bad)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(phs(&["distance", "--in", s(&a)]).status.code(), Some(2));
    let missing = dir.path().join("missing.json");
    assert_eq!(
        phs(&["distance", "--in", s(&a), "--in", s(&missing)])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_suites() {
    let out = phs(&["verify", "metrics", "--dim", "2", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["suite"], "metrics");
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert!(v["cases"]
        .as_array()
        .unwrap()
        .iter()
        .all(|c| c["failed"] == 0));

    let out = phs(&["verify", "topology", "--dim", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let names: Vec<String> = json(&out)["cases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["name"].as_str().unwrap().to_string())
        .collect();
    assert!(names.contains(&"ball-identity".to_string()));
    assert!(names.contains(&"separation".to_string()));

    assert_eq!(phs(&["verify", "bogus"]).status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let with_env = Command::new(env!("CARGO_BIN_EXE_phs"))
        .args(["random", "--dim", "3"])
        .env("PHS_SEED", "42")
        .output()
        .unwrap();
    let with_flag = phs(&["random", "--dim", "3", "--seed", "42"]);
    let default = phs(&["random", "--dim", "3"]);
    assert_eq!(with_env.stdout, with_flag.stdout);
    assert_ne!(with_env.stdout, default.stdout);

    let flag_wins = Command::new(env!("CARGO_BIN_EXE_phs"))
        .args(["random", "--dim", "3", "--seed", "7"])
        .env("PHS_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(
        flag_wins.stdout,
        phs(&["random", "--dim", "3", "--seed", "7"]).stdout
    );
}

#[test]
fn counterexample_report() {
    let dir = TempDir::new().unwrap();
    let seq = dir.path().join("seq.json");
    let out = phs(&[
        "counterexample",
        "--dim",
        "32",
        "--length",
        "32",
        "--out",
        s(&seq),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    for r in v["consecutive_rho_n"].as_array().unwrap() {
        assert!((r.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
    assert_eq!(v["report"]["weak"]["cauchy"], true);
    assert_eq!(v["report"]["norm"]["cauchy"], false);
    assert_eq!(v["report"]["norm"]["limit_candidate"], Value::Null);
    assert_eq!(v["report"]["weak_cauchy_kind"], "probe-cauchy");

    let saved: Value = serde_json::from_str(&fs::read_to_string(&seq).unwrap()).unwrap();
    assert_eq!(saved["dim"], 32);
    assert_eq!(saved["states"].as_array().unwrap().len(), 32);

    assert_eq!(
        phs(&["counterexample", "--dim", "4", "--length", "8"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn converge_on_sequence_file() {
    let dir = TempDir::new().unwrap();
    let states: Vec<Value> = (1..=200)
        .map(|k| {
            let t = 1.0 / (k * k) as f64;
            serde_json::json!([[1.0, 0.0], [t, 0.0]])
        })
        .collect();
    let doc = serde_json::json!({"dim": 2, "states": states, "label": "tilted"});
    let path = write(&dir, "seq.json", &doc.to_string());
    let out = phs(&[
        "converge",
        "--in",
        s(&path),
        "--probes",
        "8",
        "--tol",
        "1e-3",
        "--tail",
        "16",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["label"], "tilted");
    for t in ["weak", "strong", "norm", "trace"] {
        assert_eq!(v[t]["converges"], true, "{t}");
        assert!(v[t]["limit_candidate"].is_array(), "{t}");
    }

    let short = write(
        &dir,
        "short.json",
        r#"{"dim": 2, "states": [[[1,0],[0,0]], [[0,0],[1,0]]]}"#,
    );
    assert_eq!(phs(&["converge", "--in", s(&short)]).status.code(), Some(3));
}

#[test]
fn sigma_report_file() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("report.json");
    let out = phs(&[
        "sigma",
        "--dim",
        "4",
        "--points",
        "20",
        "--grid",
        "10",
        "--seed",
        "5",
        "--out",
        s(&out_path),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["equal"], true);
    assert_eq!(v["refinement"], "equal");
    assert_eq!(v["atoms_xi"], v["atoms_sigma"]);
    assert_eq!(v["atoms_xi"].as_array().unwrap().len(), 20);
}

#[test]
fn ray_materialize_and_oracle() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", "[[0, 1], [0, 1]]");
    let out = phs(&["ray", "--in", s(&a)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["canonical"], true);
    let first = &v["components"][0];
    assert!(first[0].as_f64().unwrap() > 0.0);
    assert_eq!(first[1], 0.0);

    let out = phs(&["ray", "--in", s(&a), "--format", "csv"]);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("index,re,im"));

    let m = dir.path().join("m.json");
    assert_eq!(
        phs(&["materialize", "--in", s(&a), "--out", s(&m)])
            .status
            .code(),
        Some(0)
    );
    let out = phs(&["oracle", "--in", s(&m)]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let spectrum: Vec<f64> = v["spectrum"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((spectrum[0] - 1.0).abs() < 1e-12 && spectrum[1].abs() < 1e-12);
    assert!((v["trace_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}
