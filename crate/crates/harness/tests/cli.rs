use dissipator::export::{export_report, load_report};
use dissipator::RunRecord;
use std::path::Path;
use std::process::Command;

fn simulate_json(dt: f64) -> String {
    format!(
        r#"{{
  "schema_version": 1,
  "seed": 3,
  "experiment": {{
    "kind": "simulate",
    "operator": {{"type": "free-jacobi", "n": 16}},
    "initial": {{"type": "basis", "j": 1}},
    "scaling": {{"amplitude": 4.0}},
    "t_end": 1.0,
    "dt": {dt},
    "sample_stride": 10
  }}
}}"#
    )
}

fn run(kind: &str, json: &str, out: &Path) -> (i32, String, String) {
    let cfg = out.join("spec.json");
    std::fs::create_dir_all(out).unwrap();
    std::fs::write(&cfg, json).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_dissipator"))
        .arg(kind)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out.join("run"))
        .env("DISSIPATOR_WORKERS", "2")
        .output()
        .unwrap();
    (
        o.status.code().unwrap(),
        String::from_utf8_lossy(&o.stdout).into_owned(),
        String::from_utf8_lossy(&o.stderr).into_owned(),
    )
}

#[test]
fn simulate_writes_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let (code, stdout, stderr) = run("simulate", &simulate_json(1e-3), d.path());
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("tau_delta = "));
    for a in ["trajectory.csv", "summary.json", "record.json"] {
        assert!(d.path().join("run").join(a).exists(), "{a}");
    }
}

#[test]
fn negative_dt_is_a_schema_error_with_path() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run("simulate", &simulate_json(-1e-3), d.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("experiment.dt"), "{stderr}");
    assert!(!d.path().join("run").exists());
}

#[test]
fn kind_mismatch_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run("sweep", &simulate_json(1e-3), d.path());
    assert_eq!(code, 2);
    assert!(stderr.contains("experiment.kind"), "{stderr}");
}

#[test]
fn unknown_field_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let json = simulate_json(1e-3).replace("\"seed\": 3,", "\"seed\": 3, \"sead\": 4,");
    let (code, _, _) = run("simulate", &json, d.path());
    assert_eq!(code, 2);
}

#[test]
fn exported_records_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let (code, _, stderr) = run("simulate", &simulate_json(1e-3), d.path());
    assert_eq!(code, 0, "{stderr}");
    let text = std::fs::read_to_string(d.path().join("run/record.json")).unwrap();
    let rec: RunRecord = serde_json::from_str(&text).unwrap();
    let rep = d.path().join("report");
    export_report(std::slice::from_ref(&rec), &rep).unwrap();
    let back = load_report(&rep).unwrap();
    assert_eq!(back.len(), 1);
    assert_eq!(back[0].summary, rec.summary);
    assert_eq!(back[0].invariants, rec.invariants);
    let csv = std::fs::read_to_string(rep.join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + rec.summary.len() + rec.points.iter().map(|p| p.summary.len()).sum::<usize>());
}
