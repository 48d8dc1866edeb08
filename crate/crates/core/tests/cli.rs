use std::path::Path;
use std::process::{Command, Output};

fn pinlayer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pinlayer")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.toml");
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

const CUBIC: &str = r#"
[model]
family = "cubic"
s = 0.1

[params]
epsilon = 0.02
D = 1.0
xi = 0.0
"#;

#[test]
fn branch_writes_json_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let r = pinlayer(&["branch", "--out", out.to_str().unwrap(), "--format", "both"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("branch.json")).unwrap()).unwrap();
    assert!(json["branch"]["v_star"].as_f64().unwrap().abs() < 1e-12);
    assert!((json["branch"]["J_prime_star"].as_f64().unwrap() - 0.2).abs() < 1e-12);

    let csv = std::fs::read_to_string(out.join("branch.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "v,h_minus,h_zero,h_plus,J");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 5);
    for cell in row {
        // d.dddddddddddddddde±x: 17 significant digits
        let mantissa = cell.trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 18, "{cell}");
        cell.parse::<f64>().unwrap();
    }
}

#[test]
fn json_only_writes_no_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let r = pinlayer(&["layer", "--out", tmp.path().to_str().unwrap(), "--format", "json"]);
    assert_eq!(r.status.code(), Some(0));
    assert!(tmp.path().join("layer.json").exists());
    assert!(!tmp.path().join("front.csv").exists());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("layer.json")).unwrap()).unwrap();
    assert_eq!(json["matching"]["passed"], serde_json::Value::Bool(true));
}

#[test]
fn report_agrees_for_stable_and_unstable() {
    for (s, verdict) in [(0.1, "stable"), (-0.5, "unstable")] {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = write_config(tmp.path(), &CUBIC.replace("s = 0.1", &format!("s = {s}")));
        let out = tmp.path().join("o");
        let r = pinlayer(&["report", "--config", &cfg, "--out", out.to_str().unwrap(), "--format", "both"]);
        assert_eq!(r.status.code(), Some(0), "s = {s}: {}", String::from_utf8_lossy(&r.stderr));
        let json: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
        assert_eq!(json["verdict"], verdict);
        for v in json["indicators"].as_object().unwrap().values() {
            assert_eq!(v, verdict);
        }
        assert!(out.join("report.csv").exists());
    }
}

#[test]
fn identical_seed_gives_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for run in ["a", "b"] {
        let out = tmp.path().join(run);
        let r = pinlayer(&["simulate", "--seed", "7", "--out", out.to_str().unwrap(), "--format", "both"]);
        assert_eq!(r.status.code(), Some(0));
        bodies.push((
            std::fs::read(out.join("simulate.json")).unwrap(),
            std::fs::read(out.join("timeseries.csv")).unwrap(),
        ));
    }
    assert!(bodies[0] == bodies[1]);
}

#[test]
fn unknown_key_is_a_validation_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{CUBIC}eps = 0.1\n").replace("xi = 0.0\neps", "xi = 0.0\n\n[grid]\nnodes"));
    let out = tmp.path().join("o");
    let r = pinlayer(&["branch", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("error.json")).unwrap()).unwrap();
    assert_eq!(err["error"]["kind"], "ValidationError");
    assert!(err["error"]["message"].as_str().unwrap().contains("grid.nodes"));
}

#[test]
fn syntax_error_reports_position() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "[model]\nfamily = \"cubic\"\ns = \n");
    let r = pinlayer(&["branch", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&r.stderr);
    assert!(stderr.contains("ParseError"), "{stderr}");
    assert!(stderr.contains("line 3"), "{stderr}");
}

#[test]
fn mass_outside_the_layer_range_fails() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &CUBIC.replace("xi = 0.0", "xi = 2.5"));
    let r = pinlayer(&["steady", "--config", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("MassOutOfRange"));
}
