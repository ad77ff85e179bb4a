use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn corpus(name: &str) -> String {
    manifest_dir().join("corpus").join(name).display().to_string()
}

fn data(name: &str) -> String {
    manifest_dir().join("tests/data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_onesided")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn find<'a>(reports: &'a Value, id: &str) -> &'a Value {
    reports.as_array().unwrap().iter().find(|r| r["theorem_id"] == id).unwrap()
}

fn met(report: &Value) -> bool {
    report["hypotheses_met"].as_array().unwrap().iter().all(|h| h["met"] == true)
}

#[test]
fn eval_extremal_rows() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "eval", "--from", "1", "--to", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out)["result"].as_array().unwrap().clone();
    let expected = [-1.0, -1.0, -1.0, -1.0, 4.0, -1.0];
    assert_eq!(rows.len(), 6);
    for (k, (row, want)) in rows.iter().zip(expected).enumerate() {
        assert_eq!(row["k"], k as i64 + 1);
        assert!((row["value"].as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn eval_empty_range() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "eval", "--from", "5", "--to", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"], Value::Array(vec![]));
}

#[test]
fn malformed_configs_exit_2_naming_the_field() {
    for (file, field) in [
        ("truncated.json", "at nodes"),
        ("bad_coefficient.json", "nodes[1].b"),
        ("float_basis.json", "basis[0].value"),
    ] {
        let out = run(&["--config", &data(file), "bounds"]);
        assert_eq!(out.status.code(), Some(2), "{file}");
        assert!(stderr(&out).contains(field), "{file}: {}", stderr(&out));
    }
    assert_eq!(run(&["--config", &data("missing.json"), "bounds"]).status.code(), Some(2));
    assert_eq!(run(&["bounds"]).status.code(), Some(2));
}

#[test]
fn bounds_extremal() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "bounds"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(find(r, "Thm1")["value"], -1.0);
    assert_eq!(find(r, "Cor1")["value"], -1.0);
    assert!(!met(find(r, "Thm4")));
}

#[test]
fn bounds_non_degenerate_pair_and_cosine() {
    let out = run(&["--config", &corpus("sqrt2_pair.json"), "bounds"]);
    let cor3 = find(&json(&out)["result"], "Cor3").clone();
    assert!(met(&cor3));
    assert!((cor3["value"].as_f64().unwrap() + 0.007_115_836_655_512_88).abs() < 1e-15);
    let out = run(&["--config", &data("cosine_unit_m2.json"), "bounds"]);
    assert_eq!(find(&json(&out)["result"], "Cor4")["value"], -0.5);
}

#[test]
fn verify_exit_codes() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "verify", "--theorem", "Thm1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["result"]["verdict"], "PASS");

    let out = run(&["--config", &corpus("extremal_n4.json"), "verify", "--theorem", "thm4"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(json(&out)["result"]["verdict"], "HYPOTHESIS-FAIL");

    // s_1 = 2cos(2π(√5-2)) ≈ 0.18 sits above -1.
    let out = run(&["--config", &data("slow_pair.json"), "--budget", "1", "verify", "--theorem", "Thm1"]);
    assert_eq!(out.status.code(), Some(3));
    let r = &json(&out)["result"];
    assert_eq!(r["verdict"], "INCONCLUSIVE");
    assert!(r["margin"].as_f64().unwrap() > 1.0);

    let out = run(&["--config", &corpus("extremal_n4.json"), "verify", "--theorem", "Thm9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn restricted_verify_scans_odd_indices() {
    let out = run(&["--config", &corpus("minus_one_n3.json"), "--budget", "1000", "--restrict", "odd", "verify", "--theorem", "Cor3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["k_best"].as_i64().unwrap() % 2, 1);
    assert_eq!(json(&out)["manifest"]["args"]["restrict"]["kind"], "odd");
}

#[test]
fn extremal_configs() {
    let out = run(&["extremal", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    let angles: Vec<&str> =
        r["config"]["nodes"].as_array().unwrap().iter().map(|n| n["angle"]["rational"].as_str().unwrap()).collect();
    assert_eq!(angles, vec!["1/5", "2/5", "3/5", "4/5"]);

    let out = run(&["extremal", "--n", "1", "--config-only"]);
    let cfg = json(&out);
    assert_eq!(cfg["nodes"][0]["angle"]["rational"], "1/2");
    assert_eq!(cfg["nodes"].as_array().unwrap().len(), 1);

    let out = run(&["extremal", "--n", "2"]);
    let scan = &json(&out)["result"]["period_scan"];
    assert_eq!(scan["period"], 3);
    assert!((scan["min"].as_f64().unwrap() + 1.0).abs() < 1e-12);

    assert_eq!(run(&["extremal", "--n", "0"]).status.code(), Some(2));
}

#[test]
fn config_only_output_round_trips() {
    let out = run(&["extremal", "--n", "3", "--config-only"]);
    let dir = std::env::temp_dir().join(format!("onesided-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("extremal3.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "eval", "--from", "0", "--to", "4"]);
    let values: Vec<f64> = json(&out)["result"].as_array().unwrap().iter().map(|r| r["value"].as_f64().unwrap()).collect();
    for (v, want) in values.iter().zip([3.0, -1.0, -1.0, -1.0, 3.0]) {
        assert!((v - want).abs() < 1e-12);
    }
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn certify_and_refusals() {
    let out = run(&["--config", &corpus("cosine_m2.json"), "certify"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["certified"], true);
    assert!(r["f_k"].as_f64().unwrap() <= -r["c_t"].as_f64().unwrap() + 2e-3);

    let out = run(&["--config", &corpus("cosine_rational.json"), "certify"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&["--config", &corpus("sqrt2_pair.json"), "certify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_budget_exhaustion_exits_3() {
    let ok = run(&["--config", &corpus("two_generators_n4.json"), "--delta", "0.01", "witness", "--t0", "1/3"]);
    assert_eq!(ok.status.code(), Some(0));
    let r = &json(&ok)["result"];
    assert!(r["delta_achieved"].as_f64().unwrap() < 0.01);

    let out = run(&["--config", &corpus("two_generators_n4.json"), "--delta", "1e-9", "--budget", "5", "witness", "--t0", "1/3"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn torsion_restriction_applies_to_witnesses() {
    let out = run(&["--config", &corpus("minus_one_n3.json"), "--restrict", "torsion", "witness", "--t0", "0.5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = &json(&out)["result"];
    assert_eq!(r["torsion"], 2);
    assert_eq!(r["k"].as_i64().unwrap() % 2, 0);
}

#[test]
fn degeneracy_and_decompose() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "degeneracy"]);
    let v = &json(&out)["result"]["verdict"];
    assert_eq!(v["verdict"], "degenerate");
    assert_eq!(v["witness"]["kind"], "ratio");
    assert_eq!(v["witness"]["order"], 5);

    let out = run(&["--config", &corpus("two_generators_n4.json"), "decompose"]);
    let r = &json(&out)["result"];
    assert_eq!(r["decomposition"]["rank"], 2);
    assert_eq!(r["projection"]["p"], serde_json::json!([1, 3]));
    assert_eq!(r["pairing_holds"], true);
}

#[test]
fn continuous_cosine() {
    let out = run(&["--config", &corpus("cosine_rational.json"), "continuous"]);
    let line = &json(&out)["result"]["line"];
    assert!((line["value"].as_f64().unwrap() + 9.0 / 8.0).abs() < 1e-12);
}

#[test]
fn csv_and_text_formats_carry_the_seed() {
    let out = run(&["--config", &corpus("extremal_n4.json"), "--seed", "42", "--format", "csv", "eval", "--to", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().contains("\"seed\":42"));
    assert_eq!(lines.next(), Some("k,value"));
    assert_eq!(lines.count(), 2);
    let out = run(&["--config", &corpus("extremal_n4.json"), "--seed", "42", "--format", "text", "eval", "--to", "1"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("manifest.seed: 42\n"));
}

#[test]
fn corpus_runs_every_file() {
    let dir = manifest_dir().join("corpus");
    let out = run(&["--budget", "20000", "corpus", "--dir", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = json(&out)["result"].as_array().unwrap().clone();
    assert!(rows.iter().all(|r| r["verdict"] != "FAIL" && r["error"].is_null()));
    assert!(rows.iter().any(|r| r["file"] == "cosine_m2.json" && r["theorem_id"] == "Cor5" && r["verdict"] == "PASS"));
}
