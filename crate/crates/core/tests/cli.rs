use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_disk-eit");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn disk-eit")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csv_values(p: &Path) -> Vec<f64> {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,value"));
    lines.map(|l| l.rsplit(',').next().unwrap().parse().unwrap()).collect()
}

fn entry(v: &Value, block: &str, i: usize, j: usize) -> f64 {
    v[block][i][j].as_f64().unwrap()
}

const UNIT: &str = r#"{"kind":"conductivity","cos":{"0":[[0,1.0]]}}"#;

#[test]
fn forward_constant_conductivity_has_diagonal_i_pi() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.json", UNIT);
    let out = dir.path().join("dtn.json");
    let o = run(&["forward", "--input", s(&input), "--output", s(&out), "--nmax", "4", "--oracle"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("oracle max relative deviation"));
    let v = json(&out);
    assert_eq!(v["N"], 4);
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { (i + 1) as f64 * PI } else { 0.0 };
            for b in ["cc", "ss"] {
                assert!((entry(&v, b, i, j) - want).abs() < 1e-13);
            }
            assert_eq!(entry(&v, "sc", i, j), 0.0);
        }
    }
}

#[test]
fn forward_unit_potential_and_empty_field() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "q.json", r#"{"kind":"potential","cos":{"0":[[0,1.0]]}}"#);
    let out = dir.path().join("dtn.json");
    assert_eq!(run(&["forward", "--input", s(&input), "--output", s(&out), "--nmax", "3"]).status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "schroedinger");
    assert!((entry(&v, "cc", 0, 0) - PI).abs() < 1e-14);

    let empty = write(&dir, "e.json", r#"{"kind":"potential"}"#);
    assert_eq!(run(&["forward", "--input", s(&empty), "--output", s(&out), "--nmax", "3"]).status.code(), Some(0));
    let v = json(&out);
    for b in ["cc", "ss", "sc", "cs"] {
        assert!(v[b].as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).all(|x| x.as_f64() == Some(0.0)));
    }
}

#[test]
fn invert_recovers_field_and_rejects_inconsistent_data() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.json", r#"{"kind":"conductivity","cos":{"0":[[0,1.0],[2,0.5]],"1":[[1,-0.25]]}}"#);
    let dtn = dir.path().join("dtn.json");
    assert_eq!(run(&["forward", "--input", s(&input), "--output", s(&dtn), "--nmax", "4"]).status.code(), Some(0));
    let rec = dir.path().join("rec.json");
    let o = run(&["invert", "--input", s(&dtn), "--output", s(&rec)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("condition estimate"));
    let field = json(&dir.path().join("rec.field.json"));
    let coeff = |k: &str, p: u64| {
        field["cos"][k]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t[0].as_u64() == Some(p))
            .map_or(0.0, |t| t[1].as_f64().unwrap())
    };
    assert!((coeff("0", 0) - 1.0).abs() < 1e-9);
    assert!((coeff("0", 2) - 0.5).abs() < 1e-9);
    assert!((coeff("1", 1) + 0.25).abs() < 1e-9);

    let mut v = json(&dtn);
    v["cc"][0][1] = Value::from(entry(&v, "cc", 0, 1) + 1e-3);
    let bad = write(&dir, "bad.json", &v.to_string());
    assert_eq!(run(&["invert", "--input", s(&bad), "--output", s(&rec)]).status.code(), Some(4));
    assert_eq!(run(&["validate", "--input", s(&bad)]).status.code(), Some(4));
    let report = dir.path().join("report.json");
    assert_eq!(run(&["validate", "--input", s(&dtn), "--output", s(&report)]).status.code(), Some(0));
    assert!(json(&report)["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn invert_zero_matrices_gives_zero_field() {
    let dir = TempDir::new().unwrap();
    let empty = write(&dir, "e.json", r#"{"kind":"potential"}"#);
    let dtn = dir.path().join("dtn.json");
    assert_eq!(run(&["forward", "--input", s(&empty), "--output", s(&dtn), "--nmax", "3"]).status.code(), Some(0));
    let rec = dir.path().join("rec.json");
    let field_out = dir.path().join("field.json");
    let o = run(&["invert", "--input", s(&dtn), "--output", s(&rec), "--field-output", s(&field_out)]);
    assert_eq!(o.status.code(), Some(0));
    let grid = dir.path().join("grid.csv");
    assert_eq!(run(&["eval", "--input", s(&rec), "--output", s(&grid)]).status.code(), Some(0));
    assert!(csv_values(&grid).iter().all(|v| *v == 0.0));
}

#[test]
fn roundtrip_reports_span_and_residual() {
    let dir = TempDir::new().unwrap();
    let good = write(&dir, "g.json", r#"{"kind":"conductivity","cos":{"1":[[1,1.0]]}}"#);
    let report = dir.path().join("r.json");
    let o = run(&["roundtrip", "--input", s(&good), "--output", s(&report), "--nmax", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&report);
    assert!(v["max_abs_error"].as_f64().unwrap() <= 1e-9);
    assert!(v["nullspace_residual"].as_array().unwrap().is_empty());
    assert!(v["admissibility"].as_f64().unwrap() > 0.0);

    let o = run(&["roundtrip", "--input", s(&good), "--output", s(&report), "--nmax", "6", "--rational"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&report)["max_abs_error"].as_f64(), Some(0.0));

    let beyond = write(&dir, "b.json", r#"{"kind":"conductivity","cos":{"0":[[0,1.0],[8,1.0]]}}"#);
    let o = run(&["roundtrip", "--input", s(&beyond), "--output", s(&report), "--nmax", "4"]);
    assert_eq!(o.status.code(), Some(1));
    let residual = &json(&report)["nullspace_residual"];
    assert_eq!(residual[0][0], "cos");
    assert_eq!(residual[0][2], 8);
}

#[test]
fn eval_field_grid() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "f.json", r#"{"kind":"conductivity","cos":{"0":[[2,1.0]]}}"#);
    let grid = dir.path().join("grid.csv");
    let o = run(&["eval", "--input", s(&input), "--output", s(&grid), "--grid-r", "4", "--grid-phi", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&grid).unwrap();
    for line in text.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[2] - (v[0] * v[0] + v[1] * v[1])).abs() < 1e-12, "{line}");
    }
}

#[test]
fn half_disk_and_arc_inversion() {
    let dir = TempDir::new().unwrap();
    let n = 3;
    let data: Vec<Vec<f64>> =
        (1..=n).map(|i| (1..=n).map(|j| if i == j { i as f64 * PI / 2.0 } else { 0.0 }).collect()).collect();
    let half = write(&dir, "h.json", &serde_json::json!({"N": n, "data": data}).to_string());
    let grid = dir.path().join("h.csv");
    let o = run(&["half-invert", "--input", s(&half), "--output", s(&grid), "--grid-r", "5", "--grid-phi", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let values = csv_values(&grid);
    assert_eq!(values.len(), 45);
    assert!(values.iter().all(|v| (v - 1.0).abs() < 1e-9));

    let zeros = vec![vec![0.0; n]; n];
    let arc = write(&dir, "a.json", &serde_json::json!({"alpha": 0.7, "N": n, "data": zeros}).to_string());
    let grid = dir.path().join("a.csv");
    let o = run(&["arc-invert", "--input", s(&arc), "--output", s(&grid), "--map-debug"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(csv_values(&grid).iter().all(|v| *v == 0.0));
    let stderr = String::from_utf8(o.stderr).unwrap();
    let mut lines = stderr.lines();
    assert_eq!(lines.next(), Some("z_re,z_im,psi_re,psi_im"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&first[..2], &[1.0, 0.0]);
    assert!((first[2].powi(2) + first[3].powi(2) - 1.0).abs() < 1e-12);

    let o = run(&["arc-invert", "--input", s(&arc), "--alpha", "2.0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn map_debug_starts_at_arc_midpoint_for_quarter_arc() {
    let dir = TempDir::new().unwrap();
    let arc = write(&dir, "a.json", r#"{"alpha": 0.7853981633974483, "N": 1, "data": [[0.0]]}"#);
    let o = run(&["arc-invert", "--input", s(&arc), "--output", s(&dir.path().join("g.csv")), "--map-debug"]);
    let stderr = String::from_utf8(o.stderr).unwrap();
    let first: Vec<f64> = stderr.lines().nth(1).unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((first[2] - h).abs() < 1e-12 && (first[3] - h).abs() < 1e-12, "{first:?}");
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let garbage = write(&dir, "g.json", "{not json");
    assert_eq!(run(&["forward", "--input", s(&garbage), "--nmax", "2"]).status.code(), Some(2));
    assert_eq!(run(&["forward", "--input", s(&dir.path().join("missing.json")), "--nmax", "2"]).status.code(), Some(2));
    let ragged = write(
        &dir,
        "r.json",
        r#"{"kind":"conductivity","N":2,"cc":[[1.0,0.0]],"ss":[[1.0,0.0],[0.0,1.0]],"sc":[[0.0,0.0],[0.0,0.0]],"cs":[[0.0,0.0],[0.0,0.0]]}"#,
    );
    assert_eq!(run(&["invert", "--input", s(&ragged)]).status.code(), Some(3));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
}

#[test]
fn muntz_table() {
    let o = run(&["muntz", "--k", "1", "--nmax", "2", "--rational"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["exponents"], serde_json::json!([1, 3, 5]));
    assert_eq!(v["coefficients"][0][0], "1");
    assert_eq!(v["coefficients"].as_array().unwrap().len(), 3);
    assert_eq!(v["norm_squared"].as_array().unwrap().len(), 3);
}
