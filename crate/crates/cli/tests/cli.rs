use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SPLIT: &str = r#"{"q": 3, "e": 2, "f": 2, "tower": [[1, 2]], "jumps": [2], "m": 4, "d": 1}"#;
const MIXED: &str = r#"{"q": 3, "e": 2, "f": 2, "z_ef": 0, "tower": [[1, 2]], "jumps": [2], "m": 2, "d": 2, "h": 1}"#;

fn tamejl(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tamejl"));
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON on stdout")
}

#[test]
fn run_split_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "split.json", SPLIT);
    let out = tamejl(&["run", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["rectifier"]["rectifier"]["on_pi"], "0/1");
    assert_eq!(v["rectifier"]["rectifier"]["on_mu_generator"], "0/1");
    assert_eq!(v["schema"], 1);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mixed.json", MIXED);
    let a = tamejl(&["run", "--config", &cfg], &[]);
    let b = tamejl(&["run", "--config", &cfg], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn cosets_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mixed.json", MIXED);
    let out = tamejl(&["cosets", "--config", &cfg], &[]);
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let keys: Vec<(u64, u64)> = rows
        .iter()
        .map(|r| (r["j"].as_u64().unwrap(), r["multiplier"].as_u64().unwrap()))
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert_eq!(rows[0]["symmetry"], "symmetric_ramified");
}

#[test]
fn single_aspect_views() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "mixed.json", MIXED);
    let r = tamejl(&["rectifier", "--config", &cfg], &[]);
    assert_eq!(r.status.code(), Some(0));
    assert_eq!(json(&r)["rectifier"]["verdict"], true);
    let z = tamejl(&["zeta", "--config", &cfg], &[]);
    assert_eq!(z.status.code(), Some(0));
    assert_eq!(json(&z)["failures"].as_array().unwrap().len(), 0);
    let t = tamejl(&["--format", "table", "run", "--config", &cfg], &[]);
    let text = String::from_utf8(t.stdout).unwrap();
    assert!(text.contains("main_theorem") && text.contains("pass"));
}

#[test]
fn invalid_config_names_the_rule() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.json",
        &MIXED.replace("\"e\": 2", "\"e\": 3"),
    );
    let out = tamejl(&["run", "--config", &cfg], &[]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not tame"), "{err}");
}

#[test]
fn mutated_sweep_fails_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "spec.json",
        r#"{"q": [3], "n_max": 4, "flags": {"mutate_zeta": true}}"#,
    );
    let out = tamejl(&["sweep", "--spec", &spec], &[("TAMEJL_JOBS", "2")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("enumerated"));
    let v = json(&out);
    let failures = v["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    let replay = write(
        dir.path(),
        "replay.json",
        &failures[0]["config"].to_string(),
    );
    let r = tamejl(&["run", "--config", &replay], &[]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn sweep_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"q": [3, 4], "n_max": 5}"#);
    let a = tamejl(&["sweep", "--spec", &spec, "--jobs", "1"], &[]);
    let b = tamejl(&["sweep", "--spec", &spec, "--jobs", "3"], &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn empty_sweep_is_vacuous() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", r#"{"q": []}"#);
    let out = tamejl(&["sweep", "--spec", &spec], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["configs"], 0);
}

#[test]
fn output_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "split.json", SPLIT);
    let dest = dir.path().join("report.json");
    let out = tamejl(
        &["run", "--config", &cfg, "-o", dest.to_str().unwrap()],
        &[],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dest).unwrap()).unwrap();
    assert_eq!(v["all_pass"], true);
}
