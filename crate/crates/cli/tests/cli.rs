//! End-to-end runs of the `seqspace` binary: exit codes, report contents,
//! json round-trips and determinism.

use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.extend(["--output", "json"]);
    let out = run(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (value, out.status.code().unwrap())
}

fn config_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

const BASE: &str = r#"{
  "orlicz": {"family": "identity"},
  "theta": {"rule": "geometric", "q": 2.0, "c": 1.0},
  "lambda": {"rule": "linear"}"#;

fn with(extra: &str) -> String {
    format!("{BASE}{extra}\n}}")
}

#[test]
fn norm_of_transformed_unit_vector_is_one_half() {
    let (v, code) = json(&["norm"]);
    assert_eq!(code, 0);
    assert!((v["norm"]["value"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert_eq!(v["y"], serde_json::json!([0.0, 1.0]));
    assert!(v["norm"]["interpretation"].as_str().unwrap().contains("sup_r"));
    assert_eq!(v["norm"]["per_block"].as_array().unwrap().len(), 2);
}

#[test]
fn norm_of_zero() {
    let (v, code) = json(&["norm", "--vector", "zero"]);
    assert_eq!(code, 0);
    assert_eq!(v["norm"]["value"].as_f64(), Some(0.0));
    let out = run(&["norm", "--vector", "0,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("norm 0\n"));
}

#[test]
fn power_orlicz_norm() {
    let (v, _) = json(&["norm", "--preset", "power-orlicz"]);
    assert!((v["norm"]["value"].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-10);
}

#[test]
fn missing_theta_is_a_config_error() {
    let f = config_file(r#"{"orlicz": {"family": "identity"}, "lambda": {"rule": "linear"}}"#);
    let out = run(&["norm", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("theta"));
}

#[test]
fn malformed_documents_exit_2() {
    for doc in ["{", "[]", &with(r#", "analysis": {"target": "l2"}"#), &with(r#", "unknown": 1"#)] {
        let f = config_file(doc);
        let out = run(&["chi", "--config", f.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{doc}");
    }
    let f = config_file(&with(r#", "analysis": {"target": "l2"}"#));
    let out = run(&["chi", "--config", f.path().to_str().unwrap()]);
    assert!(String::from_utf8(out.stderr).unwrap().contains("analysis.target"));
    assert_eq!(run(&["chi", "--preset", "no-such-preset"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn zero_samples_exit_2() {
    let f = config_file(&with(r#", "verify": {"samples": 0}"#));
    let out = run(&["verify", "--config", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("samples"));
}

#[test]
fn validation_failures_exit_3() {
    let bad_lambda = r#"{"orlicz": {"family": "identity"}, "theta": {"rule": "geometric", "q": 2.0, "c": 1.0}, "lambda": {"rule": "power", "d": -1.0}}"#;
    let concave = r#"{"orlicz": {"family": "table", "knots": [[0.0, 0.0], [1.0, 1.0], [2.0, 1.5]]}, "theta": {"explicit": [0, 2, 4]}, "lambda": {"rule": "linear"}}"#;
    let no_matrix = &with("");
    for (doc, cmd) in [(bad_lambda, "norm"), (concave, "norm"), (no_matrix, "chi")] {
        let f = config_file(doc);
        let out = run(&[cmd, "--config", f.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(3), "{doc}");
    }
    // the support of Λ̄x reaches past k_R
    let out = run(&["norm", "--vector", "1,1,1,1,1", "--R", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr).unwrap().contains("increase R"));
}

#[test]
fn chi_presets() {
    let (v, code) = json(&["chi", "--preset", "finite-rank"]);
    assert_eq!(code, 0);
    assert_eq!(v["estimate"]["lower"].as_f64(), Some(0.0));
    assert_eq!(v["estimate"]["upper"].as_f64(), Some(0.0));
    assert_eq!(v["verdict"]["verdict"], "compact");
    assert_eq!(v["verdict"]["criterion"], "Cor 4.3(a)");
    assert_eq!(v["estimate"]["per_n"].as_array().unwrap().len(), 257);

    let (v, _) = json(&["chi", "--preset", "constant-row-c0"]);
    assert!((v["estimate"]["lower"].as_f64().unwrap() - 0.5).abs() < 1e-10);
    assert_eq!(v["estimate"]["lower"], v["estimate"]["upper"]);
    assert_eq!(v["verdict"]["verdict"], "not-compact");

    let (v, _) = json(&["chi", "--preset", "constant-row-c"]);
    assert_eq!(v["estimate"]["upper"].as_f64(), Some(0.0));
    assert_eq!(v["verdict"]["criterion"], "Cor 4.3(b)");

    let (v, _) = json(&["chi", "--preset", "linf-source"]);
    assert_eq!(v["verdict"]["verdict"], "compact");
    assert_eq!(v["verdict"]["criterion"], "Thm 5.3");
}

#[test]
fn classify_series_targets() {
    let (v, _) = json(&["classify", "--preset", "cs0-telescoping"]);
    assert_eq!(v["target"], "cs0");
    assert_eq!(v["verdict"]["criterion"], "Cor 5.9(1)");
    assert_eq!(v["verdict"]["verdict"], "compact");
    let (v, _) = json(&["classify", "--preset", "summation-bs"]);
    assert_eq!(v["target"], "bs");
    assert_eq!(v["verdict"]["criterion"], "Cor 5.9(3)");
    assert_eq!(v["verdict"]["verdict"], "inconclusive");
}

#[test]
fn opnorm_presets() {
    let (v, code) = json(&["opnorm", "--preset", "identity-assoc"]);
    assert_eq!(code, 0);
    assert!((v["opnorm"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["opnorm"]["diverging"], false);
    assert_eq!(v["opnorm"]["criterion"], "Lemma 3.3");

    let (v, _) = json(&["opnorm", "--preset", "summation-bs"]);
    assert_eq!(v["opnorm"]["diverging"], true);
    assert_eq!(v["opnorm"]["criterion"], "Cor 5.7");

    let f = config_file(&with(r#", "matrix": {"family": "finite-rank", "rows": []}, "analysis": {"N": 64, "window": 16}"#));
    let (v, _) = json(&["opnorm", "--config", f.path().to_str().unwrap()]);
    assert_eq!(v["opnorm"]["value"].as_f64(), Some(0.0));
}

#[test]
fn verify_exit_codes() {
    let out = run(&["verify", "--preset", "classical-singleton"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    // negative control: a perturbed dual transform breaks the duality row
    let (v, code) = json(&["verify", "--preset", "classical-singleton", "--debug-corrupt-dual"]);
    assert_eq!(code, 1);
    let failing: Vec<&Value> = v["rows"].as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["tag"], "Eq. (9)");

    // with 2^r blocks the sampler exceeds sum |abar_k| for a = e1: it
    // reaches the block dual norm sum_r h_r max |abar_k| instead
    let (v, code) = json(&["verify"]);
    assert_eq!(code, 1);
    let failing: Vec<&Value> = v["rows"].as_array().unwrap().iter().filter(|r| r["passed"] == false).collect();
    assert_eq!(failing.len(), 1);
    assert_eq!(failing[0]["tag"], "Eq. (3) / Lemma 3.1");
    assert!(failing[0]["measured"].as_f64().unwrap() <= 4.0 + 1e-9);
}

#[test]
fn json_round_trips() {
    for args in [
        vec!["norm"],
        vec!["opnorm", "--preset", "cesaro-c0", "--N", "256"],
        vec!["chi", "--preset", "lambda-prime"],
        vec!["classify", "--preset", "constant-row-c"],
        vec!["verify", "--preset", "finite-rank"],
    ] {
        let mut full = args.clone();
        full.extend(["--output", "json"]);
        let text = String::from_utf8(run(&full).stdout).unwrap();
        let value: Value = serde_json::from_str(&text).unwrap();
        let again = serde_json::to_string_pretty(&value).unwrap() + "\n";
        assert_eq!(text, again, "{args:?}");
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    for args in [["chi", "--preset", "cesaro-c0"], ["verify", "--preset", "identity-assoc"]] {
        let a = run(&[&args[..], &["--output", "json", "--seed", "7"]].concat());
        let b = run(&[&args[..], &["--output", "json", "--seed", "7"]].concat());
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout);
    }
    let (v, _) = json(&["verify", "--preset", "classical-singleton", "--seed", "99"]);
    assert_eq!(v["meta"]["seed"], 99);
}

#[test]
fn overrides_apply() {
    let (v, _) = json(&["chi", "--preset", "identity-assoc", "--N", "512", "--R", "9"]);
    assert_eq!(v["meta"]["N"], 512);
    assert_eq!(v["meta"]["R"], 9);
    assert_eq!(v["meta"]["r_source"], "config");
    assert_eq!(v["estimate"]["tail_window"], serde_json::json!([448, 512]));
}
