use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn wick(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wick")).args(args).output().expect("binary runs")
}

fn testbed(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../testbeds").join(name)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn real(v: &Value) -> f64 {
    v.as_str().expect("reals are strings").parse().unwrap()
}

#[test]
fn de_factor_2_on_the_shipped_testbed() {
    let tb = testbed("t11.json");
    let out = wick(&["check", "de-factor-2", "--testbed", tb.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    let pullback = &rep["result"]["details"]["pullback"];
    assert!((real(&pullback["fitted_c"]) - 2.0).abs() < 1e-6);
    assert_eq!(rep["job"]["seed"], 7);
    assert_eq!(rep["job"]["command"], "check");
}

#[test]
fn de_linear_identity_counts_every_trial() {
    let out = wick(&["check", "de-linear-identity", "--trials", "100"]);
    assert_eq!(out.status.code(), Some(0));
    let rep = report(&out);
    for row in rep["result"]["details"]["tracks"].as_array().unwrap() {
        assert_eq!(row["equal"], 100, "{row}");
    }
}

#[test]
fn empty_lamination_gives_a_fuchsian_pair() {
    let out = wick(&["wick", "ads", "--m", "0.3,-0.7", "--l", "empty"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &report(&out)["result"];
    assert_eq!(r["left_trace_panel"], r["right_trace_panel"]);
    assert_eq!(real(&r["panel_distance"]), 0.0);
}

#[test]
fn rational_earthquakes_invert_exactly() {
    let out = wick(&["earthquake", "--m", "1/3,-1/2", "--l", "1,2,3", "--t", "1/2"]);
    assert_eq!(out.status.code(), Some(0));
    let moved: Vec<String> = report(&out)["result"]["point"]["reduced"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect();
    let back = wick(&["earthquake", "--m", &moved.join(","), "--l", "1,2,3", "--t", "1/2", "--side", "r"]);
    assert_eq!(report(&back)["result"]["point"]["reduced"], serde_json::json!(["1/3", "-1/2"]));
}

#[test]
fn reports_are_reproducible_and_written_atomically() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<PathBuf> = (0..2).map(|i| dir.path().join(format!("r{i}.json"))).collect();
    for p in &paths {
        let out = wick(&["check", "mink-cocycle", "--trials", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    let a = std::fs::read_to_string(&paths[0]).unwrap();
    let b = std::fs::read_to_string(&paths[1]).unwrap();
    // Only the recorded output path differs.
    assert_eq!(a.replace("r0.json", "r1.json"), b);
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    assert_eq!(names.len(), 2, "{names:?}");
}

#[test]
fn gate_failures_exit_1_and_name_the_gate() {
    let out = wick(&["check", "de-factor-2", "--tol", "1e-15", "--trials", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max-dev"));
    assert_eq!(report(&out)["result"]["passed"], false);
}

#[test]
fn input_errors_exit_2_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"format\": \"wick-testbed/1\",\n  \"name\": 4\n}\n").unwrap();
    let out = wick(&["holonomy", "--testbed", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(wick(&["check", "no-such-check"]).status.code(), Some(2));
    assert_eq!(wick(&["holonomy", "--m", "1,x"]).status.code(), Some(2));
    assert_eq!(wick(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(wick(&["form", "--kind", "goldman-tr1", "--u", "1,0", "--v", "0,1", "--testbed", "t11"]).status.code(), Some(2));
}

#[test]
fn bundled_testbeds_export_unchanged() {
    for name in ["t11", "g2", "onesw"] {
        let out = wick(&["testbed", name]);
        assert_eq!(out.status.code(), Some(0));
        let shipped: Value = serde_json::from_str(&std::fs::read_to_string(testbed(&format!("{name}.json"))).unwrap()).unwrap();
        assert_eq!(report(&out)["result"], shipped);
    }
}

#[test]
fn goldman_form_on_a_twist_pair() {
    let out = wick(&["form", "--kind", "goldman-killing-real", "--u", "1,0,0,0,0,0", "--v", "0,0,0,1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = real(&report(&out)["result"]["value"]["value"]);
    assert!((v - 0.5).abs() < 1e-6, "{v}");
}
