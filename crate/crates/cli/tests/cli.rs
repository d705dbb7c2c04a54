use std::process::{Command, Output};

fn qgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgs")).args(args).output().unwrap()
}

fn json(path: &std::path::Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn spectrum_of_k4_reports_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    assert!(qgs(&["spectrum", "--graph", "complete", "--n", "4", "--out", &out]).status.success());
    let v = json(&dir.path().join("spectrum.json"));
    assert!((v["g"].as_f64().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(v["mult_plus1"]["measured"], 4);
    let phases = std::fs::read_to_string(dir.path().join("w_phases.csv")).unwrap();
    assert_eq!(phases.lines().count(), 13);
}

#[test]
fn lattice_gap() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    assert!(qgs(&["spectrum", "--graph", "lattice", "--L", "5", "--D", "3", "--out", &out]).status.success());
    let g = json(&dir.path().join("spectrum.json"))["g"].as_f64().unwrap();
    assert!((g - 0.2303277).abs() < 1e-7);
}

#[test]
fn irregular_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.edges");
    std::fs::write(&f, "4 2\n0 1\n1 2\n2 3\n").unwrap();
    let o = qgs(&["spectrum", "--graph", &format!("file:{}", f.display()), "--out", &dir.path().display().to_string()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("degree"));
}

#[test]
fn graph_file_roundtrip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    assert!(qgs(&["graph", "--graph", "random", "--n", "20", "--d", "3", "--seed", "2", "--out", &out]).status.success());
    let f = dir.path().join("graph.edges");
    let text = std::fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("20 3\n"));
    assert_eq!(text.lines().count(), 31);
    let sub = dir.path().join("s");
    let o = qgs(&["search", "--graph", &format!("file:{}", f.display()), "--targets", "0", "--delta", "zero", "--out", &sub.display().to_string()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn search_on_k256_uses_exact_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let o = qgs(&["search", "--graph", "complete", "--n", "256", "--targets", "0,1,2,3", "--delta", "zero", "--steps", "auto", "--out", &out]);
    assert!(o.status.success());
    let v = json(&dir.path().join("summary.json"));
    assert!((v["alpha"].as_f64().unwrap() - (251.0f64 / 255.0).acos()).abs() < 1e-12);
    assert!((v["D_s"].as_f64().unwrap() - 0.984375).abs() < 1e-9);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("step,p_s\n0,"));
    assert_eq!(trace.lines().count(), v["Q"].as_u64().unwrap() as usize + 2);
}

#[test]
fn lattice_auto_delta_follows_dimension_rule() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    assert!(qgs(&["search", "--graph", "lattice", "--L", "4", "--D", "3", "--m", "1", "--delta", "auto", "--out", &out]).status.success());
    let v = json(&dir.path().join("summary.json"));
    assert!((v["delta"].as_f64().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
}

#[test]
fn disconnecting_targets_fail() {
    let dir = tempfile::tempdir().unwrap();
    let o = qgs(&["search", "--graph", "lattice", "--L", "4", "--D", "1", "--targets", "0,2", "--out", &dir.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"graph":"complete","n":16,"targets":"0","delta":"zero","steps":"3"}"#).unwrap();
    let out = dir.path().join("o").display().to_string();
    assert!(qgs(&["search", "--config", &cfg.display().to_string(), "--n", "20", "--out", &out]).status.success());
    let v = json(&dir.path().join("o/summary.json"));
    assert_eq!(v["N"], 20);
    assert_eq!(v["Q"], 3);
}

#[test]
fn verify_exit_codes() {
    assert!(qgs(&["verify", "appendixA"]).status.success());
    let o = qgs(&["verify", "nosuchsuite"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qgs(&["verify", "complete-graph"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).trim_end().ends_with("complete-graph: PASS"));
}

#[test]
fn sweep_usage_errors_and_fit_line() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    assert_eq!(qgs(&["sweep", "--graph", "complete", "--axis", "N", "--values", "", "--out", &out]).status.code(), Some(2));
    let o = qgs(&["sweep", "--graph", "lattice", "--D", "5", "--axis", "L", "--values", "3..5", "--measure", "lattice-sums", "--fit", "N:S2", "--out", &out]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let slope: f64 = csv.lines().last().unwrap().split("slope=").nth(1).unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!((slope - 1.0).abs() < 0.15);
}

#[test]
fn dense_cap_guidance() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qgs"))
        .args(["spectrum", "--graph", "complete", "--n", "8", "--out", &dir.path().display().to_string()])
        .env("QGS_DENSE_CAP", "10")
        .output()
        .unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("QGS_DENSE_CAP"));
}
