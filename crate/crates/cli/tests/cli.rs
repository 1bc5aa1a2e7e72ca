use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gammasum::format::to_json_pretty;
use gammasum::DensityCurve;
use serde_json::Value;

fn gammasum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammasum"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn real(v: &Value) -> f64 {
    match v {
        Value::String(s) => gammasum::format::parse_real(s).unwrap(),
        v => v.as_f64().unwrap(),
    }
}

#[test]
fn density_csv_peaks_at_closed_form_mode() {
    let text = stdout(&gammasum(&["density", "--gamma", "1", "--weights", "0.5,0.5", "--grid", "0.01:6:512"]));
    let curve = DensityCurve::from_csv(&text).unwrap();
    assert_eq!(curve.grid.len(), 512);
    let (x, p) = curve.max_point().unwrap();
    // S = Gamma(2)/√2: mode 1/√2, peak √2/e
    assert!((p - 2f64.sqrt() / 1f64.exp()).abs() < 1e-4, "{p}");
    assert!((x - 0.5f64.sqrt()).abs() < 0.02, "{x}");
}

#[test]
fn density_csv_round_trips_through_the_library() {
    let text = stdout(&gammasum(&["density", "--gamma", "0.7", "--weights", "0.6,0.3,0.1", "--grid", "0.05:4:64"]));
    let (curve, extra) = DensityCurve::from_csv_with(&text).unwrap();
    assert_eq!(curve.engine, gammasum::Engine::Convolution);
    assert!(extra.contains_key("config") && extra.contains_key("version"));
    assert_eq!(curve.to_csv_with(extra).unwrap(), text);
}

#[test]
fn json_output_round_trips_byte_for_byte() {
    let text = stdout(&gammasum(&["density", "--gamma", "2", "--weights", "1,3", "--grid", "0.1:5:32", "--format", "json"]));
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(to_json_pretty(&value).unwrap(), text);
    assert_eq!(value["results"]["values"].as_array().unwrap().len(), 32);
}

#[test]
fn normalize_matches_prenormalized_weights() {
    let a = stdout(&gammasum(&["moments", "--gamma", "1.5", "--weights", "1,1", "--normalize"]));
    let b = stdout(&gammasum(&["moments", "--gamma", "1.5", "--weights", "0.5,0.5"]));
    let (a, b): (Value, Value) = (serde_json::from_str(&a).unwrap(), serde_json::from_str(&b).unwrap());
    assert_eq!(a["results"], b["results"]);
}

#[test]
fn exponential_entropy_and_moments() {
    let e = json(&gammasum(&["entropy", "--gamma", "1", "--weights", "1", "--alpha", "1,2,inf"]));
    let values: Vec<f64> = e["results"].as_array().unwrap().iter().map(|r| real(&r["value"])).collect();
    // Exp(1): h = 1, h_2 = ln 2, h_∞ = 0
    assert!((values[0] - 1.0).abs() < 1e-9);
    assert!((values[1] - 2f64.ln()).abs() < 1e-9);
    assert!(values[2].abs() < 1e-9);

    let m = json(&gammasum(&["moments", "--gamma", "1", "--weights", "1", "--max-order", "4"]));
    let mu: Vec<f64> = m["results"]["central_moments"].as_array().unwrap().iter().map(real).collect();
    assert_eq!(mu, vec![1.0, 0.0, 1.0, 2.0, 9.0]);
}

#[test]
fn unbounded_max_density_is_a_sentinel() {
    let v = json(&gammasum(&["maxdensity", "--gamma", "0.5", "--weights", "1"]));
    assert_eq!(v["results"]["value"], "+inf");
    let v = json(&gammasum(&["maxdensity", "--gamma", "0.5", "--weights", "1,1", "--normalize"]));
    // S = Gamma(1)/√2
    assert!((real(&v["results"]["value"]) - 2f64.sqrt()).abs() < 1e-8);
}

#[test]
fn divergent_renyi_order_is_reported() {
    let v = json(&gammasum(&["entropy", "--gamma", "0.2", "--weights", "1,1", "--alpha", "3"]));
    assert_eq!(v["results"][0]["value"], "-inf");
}

#[test]
fn exit_codes() {
    let numeric = gammasum(&["density", "--gamma", "0.5", "--weights", "0.5,0.5", "--engine", "cf"]);
    assert_eq!(numeric.status.code(), Some(3));
    for args in [
        &["certify", "--suite", "no-such-suite"][..],
        &["density", "--gamma", "1", "--weights", "1,-1"],
        &["density", "--gamma", "1", "--weights", "1", "--grid", "3:1:10"],
        &["moments", "--gamma", "1", "--weights", "1", "--format", "csv"],
        &["entropy", "--gamma", "0", "--weights", "1"],
        &["--jobs", "0", "moments", "--gamma", "1", "--weights", "1"],
    ] {
        assert_eq!(gammasum(args).status.code(), Some(2), "{args:?}");
    }
}

fn certify_to(dir: &Path, name: &str, extra: &[&str]) -> (Output, String) {
    let path = dir.join(name);
    let mut args = vec!["certify", "--output", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = gammasum(&args);
    (out, fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn certify_reports_are_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, ra) = certify_to(dir.path(), "a.json", &["--suite", "entropy", "--trials", "12", "--seed", "4"]);
    let (b, rb) = certify_to(dir.path(), "b.json", &["--suite", "entropy", "--trials", "12", "--seed", "4", "--jobs", "2"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(b.status.code(), Some(0));
    let results = |t: &str| {
        let v: Value = serde_json::from_str(t).unwrap();
        to_json_pretty(&v["results"]).unwrap()
    };
    assert_eq!(results(&ra), results(&rb));
    let (_, rc) = certify_to(dir.path(), "c.json", &["--suite", "entropy", "--trials", "12", "--seed", "5"]);
    assert_ne!(results(&ra), results(&rc));
}

#[test]
fn replay_of_a_recorded_case() {
    let dir = tempfile::tempdir().unwrap();
    let (_, report) = certify_to(dir.path(), "r.json", &["--suite", "moments", "--trials", "5"]);
    let report: Value = serde_json::from_str(&report).unwrap();
    let case = &report["results"][0]["cases"][3];
    let case_file = dir.path().join("case.json");
    fs::write(&case_file, serde_json::to_string(case).unwrap()).unwrap();
    let (out, replayed) = certify_to(dir.path(), "replay.json", &["--replay", case_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let replayed: Value = serde_json::from_str(&replayed).unwrap();
    let again = &replayed["results"][0]["cases"][0];
    assert_eq!(again["inputs"], case["inputs"]);
    assert_eq!(again["margin"], case["margin"]);

    // bare inputs with the pair the wrong way round must fail
    let swapped = r#"{"kind":"moments","shape":1.0,"upper":[0.5,0.5],"lower":[1.0,0.0],"max_order":6}"#;
    fs::write(&case_file, swapped).unwrap();
    let (out, _) = certify_to(dir.path(), "bad.json", &["--replay", case_file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn explore_reports_a_ratio() {
    let v = json(&gammasum(&["explore", "--gamma", "0.75", "--n", "3", "--trials", "20"]));
    let r = &v["results"];
    assert_eq!(r["k"], 1);
    assert!(real(&r["ratio_min"]) <= real(&r["ratio_max"]));
}
