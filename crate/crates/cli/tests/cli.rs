use std::path::PathBuf;
use std::process::{Command, Output};

fn plate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plate")).args(args).output().unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name).to_str().unwrap().to_string()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn solve_json_schema() {
    let o = plate(&["solve", &config("table1.json"), "--json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["omega_max_mm", "location_mm", "sigma1_max_mpa", "criteria", "n_used", "r", "k", "timings_s"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["omega_max_mm"].as_f64().unwrap() - 0.41214).abs() < 0.002);
    assert_eq!(v["n_used"], 12);
    assert_eq!(v["location_mm"][0].as_f64().unwrap(), 125.0);
    let c = &v["criteria"][0];
    for key in ["kind", "measured", "limit", "pass"] {
        assert!(c.get(key).is_some(), "criterion missing {key}");
    }
    assert!(v["timings_s"].is_null());
}

#[test]
fn solve_json_is_reproducible_without_timings() {
    let a = plate(&["solve", &config("ss_square.json"), "--json"]);
    let b = plate(&["solve", &config("ss_square.json"), "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let t = plate(&["solve", &config("ss_square.json"), "--json", "--timings"]);
    let v: serde_json::Value = serde_json::from_slice(&t.stdout).unwrap();
    assert!(v["timings_s"]["total"].as_f64().unwrap() >= 0.0);
}

#[test]
fn failing_design_exits_two() {
    let o = plate(&["solve", &config("bookcase_3mm.json")]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stdout).contains("verdict: FAIL"));
    assert_eq!(code(&plate(&["solve", &config("bookcase.json")])), 0);
}

#[test]
fn bad_config_exits_one_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, r#"{"schema_version": 1, "material": {"kind": "isotropic", "E_GPa": 70, "nu": 0.3},
        "plate": {"Lx_mm": 100, "Ly_mm": 100, "t_mm": "thick"}, "edges": [], "loads": []}"#)
        .unwrap();
    let o = plate(&["solve", p.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("plate.t_mm"));
    assert_eq!(code(&plate(&["solve", "/nonexistent/config.json"])), 1);
}

#[test]
fn field_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.csv");
    let png = dir.path().join("w.png");
    let o = plate(&[
        "field",
        &config("table1.json"),
        "--field",
        "deflection",
        "--grid",
        "5",
        "--out",
        out.to_str().unwrap(),
        "--png",
        png.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x_mm,y_mm,value");
    assert_eq!(lines.len(), 26);
    // Row-major: x varies fastest.
    assert!(lines[1].starts_with("0.00000000e0,0.00000000e0,"));
    // Boundary conditions hold at collocation points, so corners are only near zero.
    let corner: f64 = lines[1].rsplit(',').next().unwrap().parse().unwrap();
    assert!(corner.abs() < 1e-2 * 0.41);
    assert!(lines[2].starts_with("6.25000000e1,0.00000000e0,"));
    assert!(lines[6].starts_with("0.00000000e0,1.25000000e2,"));
    let centre: Vec<&str> = lines[13].split(',').collect();
    assert_eq!(centre[0], "1.25000000e2");
    assert_eq!(centre[1], "2.50000000e2");
    let w: f64 = centre[2].parse().unwrap();
    assert!((w - 0.41214).abs() < 0.002);
    for l in &lines[1..] {
        for f in l.split(',') {
            let mantissa = f.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 9, "{f}");
        }
    }
    assert_eq!(&std::fs::read(&png).unwrap()[1..4], b"PNG");
}

#[test]
fn sweep_exit_codes() {
    let glass = config("glass_table.json");
    let o = plate(&["sweep", &glass, "--param", "load_kg", "--values", "0.73,6.77", "--json"]);
    assert_eq!(code(&o), 0);
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    assert_eq!(rows[0]["value"].as_f64().unwrap(), 0.73);
    assert!(rows[0]["sigma1_max_mpa"].as_f64().unwrap() < rows[1]["sigma1_max_mpa"].as_f64().unwrap());

    let o = plate(&["sweep", &config("bookcase.json"), "--param", "t_mm", "--values", "2,3"]);
    assert_eq!(code(&o), 2);
    let o = plate(&["sweep", &config("bookcase.json"), "--param", "t_mm", "--values", "3,6"]);
    assert_eq!(code(&o), 0);
    let o = plate(&["sweep", &glass, "--param", "load_kg", "--values", ""]);
    assert_eq!(code(&o), 1);
    let o = plate(&["sweep", &glass, "--param", "colour", "--values", "1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn convergence_and_oracle_run() {
    let o = plate(&["convergence", &config("ss_square.json")]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("termination: converged"));
    let o = plate(&["oracle", &config("ss_square.json"), "--grid", "41"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("navier"));
    // Free edges have no finite-difference reference.
    assert_eq!(code(&plate(&["oracle", &config("bookcase.json")])), 1);
}
