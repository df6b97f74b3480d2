use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn asset(name: &str) -> String {
    format!("{}/assets/{}", env!("CARGO_MANIFEST_DIR"), name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("asym-mms-cli-{}-{}", std::process::id(), name));
    let _ = fs::remove_dir_all(&dir);
    dir
}

fn run(args: &[&str], out: &Path) -> i32 {
    let status = Command::new(env!("CARGO_BIN_EXE_asym-mms"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    status.status.code().unwrap_or(-1)
}

fn column(csv: &str, col: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(col).unwrap().parse().unwrap()).collect()
}

#[test]
fn validate_exit_codes() {
    let out = scratch("validate");
    assert_eq!(run(&["validate", "--space", &asset("two_point.json")], &out), 0);
    assert_eq!(run(&["validate", "--space", &asset("bad_triangle.json")], &out), 1);
    let report = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("triangle") && report.contains("[\n        0,\n        1,\n        2\n      ]"), "{}", report);
    let bad = out.join("broken.json");
    fs::write(&bad, "{\"points\": [").unwrap();
    assert_eq!(run(&["validate", "--space", bad.to_str().unwrap()], &out), 2);
}

#[test]
fn heatflow_matches_the_two_point_closed_form() {
    let out = scratch("heatflow");
    let args = ["heatflow", "--space", &asset("two_point.json"), "--f", &asset("two_point_f0.csv"), "--T", "1", "--steps", "20", "--tol", "1e-12"];
    assert_eq!(run(&args, &out), 0);
    let table = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let values = column(&table, 3);
    let tau: f64 = 0.05;
    for k in 0..=20 {
        // implicit Euler contracts the gap by 1/(1+2τ) and keeps the mean
        let gap = (1.0 + 2.0 * tau).powi(-k);
        let (a, b) = (values[2 * k as usize], values[2 * k as usize + 1]);
        assert!((b - a - gap).abs() < 1e-9, "step {}: {} vs {}", k, b - a, gap);
        assert!((a + b - 1.0).abs() < 1e-9);
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["outcome"], "ok");
    assert_eq!(manifest["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let (a, b) = (scratch("repro-a"), scratch("repro-b"));
    let args = ["heatflow", "--space", &asset("two_point.json"), "--f", &asset("two_point_f0.csv"), "--steps", "7", "--q", "3"];
    assert_eq!(run(&args, &a), 0);
    assert_eq!(run(&args, &b), 0);
    assert_eq!(fs::read(a.join("trajectory.csv")).unwrap(), fs::read(b.join("trajectory.csv")).unwrap());
}

#[test]
fn sobolev_asymmetry_ratio_grows() {
    let out = scratch("sobolev");
    assert_eq!(run(&["sobolev-asymmetry", "--model", "funk", "--f", "neg-sqrt", "--plot"], &out), 0);
    let ratios = column(&fs::read_to_string(out.join("sobolev.csv")).unwrap(), 5);
    assert_eq!(ratios.len(), 3);
    assert!(ratios[0] > 1.0 && ratios[1] > ratios[0] && ratios[2] > ratios[1], "{:?}", ratios);
    assert!(fs::read_to_string(out.join("sobolev.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn hjcheck_residual_decreases() {
    let out = scratch("hjcheck");
    assert_eq!(run(&["hjcheck"], &out), 0);
    let r = column(&fs::read_to_string(out.join("hjcheck.csv")).unwrap(), 3);
    assert!(r.windows(2).all(|w| w[1] < w[0]), "{:?}", r);
}

#[test]
fn transport_commands() {
    let out = scratch("transport");
    let sp = asset("two_point.json");
    let (a, b) = (asset("dirac_a.csv"), asset("dirac_b.csv"));
    assert_eq!(run(&["wasserstein", "--space", &sp, "--mu", &b, "--nu", &a, "--p", "2"], &out), 0);
    let w: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("wasserstein.json")).unwrap()).unwrap();
    assert!((w["value"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(run(&["dual", "--space", &sp, "--mu", &a, "--nu", &b], &out), 0);
    assert_eq!(run(&["krw1", "--space", &sp, "--mu", &a, "--nu", &b], &out), 0);
}

#[test]
fn input_errors_exit_with_two() {
    let out = scratch("errors");
    let sp = asset("two_point.json");
    let f = asset("two_point_f0.csv");
    assert_eq!(run(&["heatflow", "--space", &sp, "--f", &f, "--tol", "2"], &out), 2);
    assert_eq!(run(&["kuwada", "--space", &sp, "--f", &f, "--p", "2", "--q", "3"], &out), 2);
    assert_eq!(run(&["slope", "--space", &sp], &out), 2);
    assert_eq!(run(&["sample", "--model", "hyperbolic", "--mesh", "0.5"], &out), 2);
}

#[test]
fn sample_then_slope() {
    let out = scratch("sample");
    assert_eq!(run(&["sample", "--model", "randers", "--mesh", "0.25", "--f", "x1"], &out), 0);
    let sp = out.join("space.json");
    let f = out.join("field.csv");
    let slopes = scratch("slope");
    assert_eq!(run(&["slope", "--space", sp.to_str().unwrap(), "--f", f.to_str().unwrap()], &slopes), 0);
    let up = column(&fs::read_to_string(slopes.join("slopes.csv")).unwrap(), 1);
    // interior points along e1 see the ascending slope 2/3 of x1
    assert!(up.iter().all(|&s| s >= 0.0), "{:?}", up);
    assert!(up.iter().any(|&s| (s - 2.0 / 3.0).abs() < 1e-12));
}

#[test]
fn kuwada_on_the_two_point_flow() {
    let out = scratch("kuwada");
    let dens = out.with_extension("csv");
    fs::write(&dens, "point,value\na,0.25\nb,0.75\n").unwrap();
    let args = ["kuwada", "--space", &asset("two_point.json"), "--f", dens.to_str().unwrap(), "--T", "1", "--steps", "200", "--lag", "20", "--tol", "1e-12"];
    assert_eq!(run(&args, &out), 0);
    let rows = fs::read_to_string(out.join("kuwada.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 181);
}
