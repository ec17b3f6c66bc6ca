use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use japar_core::synthetic::*;
use japar_core::{MagnetizationCurve as Curve, HysteresisParams, SimOptions};
use serde_json::Value;
use tempfile::TempDir;

fn japar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_japar"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write_curve(dir: &TempDir, name: &str, curve: &Curve) -> PathBuf {
    let path = dir.path().join(name);
    let mut text = String::from("H,M\n");
    for s in &curve.samples {
        text.push_str(&format!("{},{}\n", s.h, s.m));
    }
    std::fs::write(&path, text).unwrap();
    path
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_ms_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let data = write_curve(&dir, "a.csv", &grid_curve(&steel_grid()[0]).unwrap());
    let out = japar(&["fit-anhysteretic", s(&data), "--temp", "303.5"]);
    assert_eq!(code(&out), 2);
    let json: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["exit_status"], 2);
    assert!(json["error"]["message"].as_str().unwrap().contains("--ms"));
}

#[test]
fn one_sample_file_is_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("one.csv");
    std::fs::write(&path, "H,M\n100,5000\n").unwrap();
    let out = japar(&["fit-anhysteretic", s(&path), "--ms", "1.6e6", "--temp", "303.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_file_is_an_input_error() {
    let out = japar(&["fit-anhysteretic", "/nonexistent/x.csv", "--ms", "1.6e6", "--temp", "300"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_simulation_parameters_are_input_errors() {
    let base = ["simulate-loop", "--ms", "1.6e6", "--aj", "972", "--alpha", "1.4e-3", "--c", "0.1"];
    for extra in [&["--k", "0"][..], &["--k", "-5"], &["--k", "1000", "--steps", "0"], &["--k", "1000", "--hmax", "0"]] {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        let out = japar(&args);
        assert_eq!(code(&out), 2, "{extra:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = japar(&["simulate-loop", "--ms", "1.6e6", "--aj", "972", "--alpha", "1.4e-3", "--c", "0.1"]);
    assert_eq!(code(&out), 2, "missing --k");
}

#[test]
fn jiles92_requires_a_loop() {
    let out = japar(&["fit-jiles92", "--ms", "1.6e6"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&japar(&["frobnicate"])), 2);
    assert_eq!(code(&japar(&["simulate-loop", "--steps", "many"])), 2);
    assert_eq!(code(&japar(&["--help"])), 0);
}

#[test]
fn fit_anhysteretic_writes_report_and_curve() {
    let dir = TempDir::new().unwrap();
    let data = write_curve(&dir, "row1.csv", &grid_curve(&steel_grid()[0]).unwrap());
    let out_path = dir.path().join("fit.json");
    let out = japar(&[
        "fit-anhysteretic", s(&data), "--ms", "1.6e6", "--temp", "303.5", "--stride", "50", "--out", s(&out_path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(&out_path);
    assert_eq!(json["exit_status"], 0);
    assert_eq!(json["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    let a_j = json.pointer("/result/a_j").and_then(Value::as_f64).unwrap();
    assert!(a_j > 0.0 && a_j.is_finite());

    let curve = std::fs::read_to_string(dir.path().join("fit.curve.csv")).unwrap();
    let mut lines = curve.lines();
    assert_eq!(lines.next(), Some("H,M_data,M_fit,r"));
    assert_eq!(lines.count(), 200);
}

#[test]
fn deterministic_reports_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let data = write_curve(&dir, "row2.csv", &grid_curve(&steel_grid()[1]).unwrap());
    let run = |name: &str| {
        let path = dir.path().join(name);
        let out = japar(&[
            "fit-anhysteretic", s(&data), "--ms", "1.6e6", "--temp", "303.5", "--stride", "50",
            "--deterministic", "--out", s(&path),
        ]);
        assert_eq!(code(&out), 0);
        std::fs::read(path).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn simulate_loop_writes_a_closed_loop() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("sim.json");
    let out = japar(&[
        "simulate-loop", "--ms", "1.6e6", "--aj", "972", "--alpha", "1.4e-3", "--c", "0.1", "--k", "1000",
        "--steps", "400", "--out", s(&out_path),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(&out_path);
    let drift = json.pointer("/result/cycle_drift").and_then(Value::as_f64).unwrap();
    assert!(drift <= 1e-3 * 1.6e6);
    let max_m = json.pointer("/result/max_abs_m").and_then(Value::as_f64).unwrap();
    assert!(max_m <= 1.6e6);

    let curve = std::fs::read_to_string(dir.path().join("sim.curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("H,M,B"));
}

#[test]
fn extract_and_jiles92_on_simulated_files() {
    let dir = TempDir::new().unwrap();
    let truth = HysteresisParams::new(972.0, 1.4e-3, 0.1, 1000.0, STEEL_MS).unwrap();
    let sim = simulate_loop(&truth, 1e4, 3, 400, &SimOptions::default()).unwrap();
    let anh = anhysteretic_curve(&steel_grid()[0].params(), STEEL_MS, &uniform_fields(2000, 1e4)).unwrap();
    let first = write_curve(&dir, "first.csv", &sim.first_magnetization);
    let lp = write_curve(&dir, "loop.csv", &sim.last_cycle);
    let an = write_curve(&dir, "anh.csv", &anh);

    let features = dir.path().join("features.json");
    let out = japar(&[
        "extract", "--ms", "1.6e6", "--first", s(&first), "--loop", s(&lp), "--anhysteretic", s(&an),
        "--out", s(&features),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(&features);
    let hc = json.pointer("/result/features/hc").and_then(Value::as_f64).unwrap();
    let mr = json.pointer("/result/features/mr").and_then(Value::as_f64).unwrap();
    // one field step is 50 A/m
    let branch_hc = japar_core::features::zero_crossing(&sim.last_cycle.samples[..=400]).unwrap().abs();
    assert!((hc - branch_hc).abs() < 50.0, "{hc} vs {branch_hc}");
    assert!(mr > 0.0 && mr < 1.6e6);

    let fit = dir.path().join("fit.json");
    let out = japar(&[
        "fit-jiles92", "--ms", "1.6e6", "--features", s(&features), "--loop", s(&lp), "--out", s(&fit),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let json = report(&fit);
    let k = json.pointer("/result/estimate/params/k").and_then(Value::as_f64).unwrap();
    assert!(k > 0.0);
}
