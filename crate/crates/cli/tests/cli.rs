use std::fs;
use std::process::Command;

fn sonic() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sonic"))
}

#[test]
fn scan_emits_one_row_per_bin() {
    let out = sonic().args(["scan", "--anchor", "220", "--span", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "cents,H01,R01,C_field,C_density");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1601);
    assert!(rows[0].starts_with("-2400,"));
    assert!(rows[1600].starts_with("2400,"));
}

#[test]
fn validate_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let good = d.path().join("good.json");
    let bad = d.path().join("bad.json");
    let worse = d.path().join("worse.json");
    fs::write(&good, r#"{"experiment": "search", "seeds": [0, 1], "search": {"lambda_c": 0.8}}"#).unwrap();
    fs::write(&bad, r#"{"experiment": "search", "search": {"lamda_c": 0.8}}"#).unwrap();
    fs::write(&worse, "{ not json").unwrap();
    assert_eq!(sonic().arg("validate").arg(&good).status().unwrap().code(), Some(0));
    let out = sonic().arg("validate").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("lamda_c"));
    assert_eq!(sonic().arg("validate").arg(&worse).status().unwrap().code(), Some(2));
    let missing = d.path().join("absent.json");
    assert_eq!(sonic().arg("validate").arg(&missing).status().unwrap().code(), Some(1));
}

#[test]
fn run_then_report() {
    let d = tempfile::tempdir().unwrap();
    let status = sonic()
        .args(["--threads", "2", "run", "--experiment", "entrain", "--seeds", "0..3"])
        .args(["--override", "entrain.oscillator.duration_s=12"])
        .env("SONIC_OUT", d.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let dir = d.path().join("entrain");
    assert_eq!(fs::read_dir(dir.join("shared")).unwrap().count(), 4);
    let manifest = fs::read_to_string(dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("entrain.oscillator.duration_s=12"));

    let out = sonic().arg("report").arg(&dir).arg("--json").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert!(report["rows"].as_array().unwrap().iter().any(|r| r["condition"] == "scrambled"));
    assert!(dir.join("report.json").is_file());

    fs::remove_dir_all(dir.join("off").join("2")).unwrap();
    let out = sonic().arg("report").arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("off/2"));
}

#[test]
fn bad_override_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let code = sonic()
        .args(["run", "--experiment", "entrain", "--seeds", "0", "--override", "entrain.nope=1"])
        .env("SONIC_OUT", d.path())
        .status()
        .unwrap()
        .code();
    assert_eq!(code, Some(2));
    let code = sonic().args(["report"]).arg(d.path()).status().unwrap().code();
    assert_eq!(code, Some(1));
}

#[test]
fn config_file_with_agent_override() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("search.json");
    fs::write(&cfg, r#"{"experiment": "search", "conditions": ["local-search"]}"#).unwrap();
    let status = sonic()
        .arg("run")
        .arg("--config")
        .arg(&cfg)
        .args(["--seeds", "0..1", "--override", "agents.lambda_C=0.8", "--out"])
        .arg(d.path())
        .status()
        .unwrap();
    assert!(status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(d.path().join("search/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["overrides"][0], "agents.lambda_C=0.8");
    assert_eq!(manifest["config"]["search"]["lambda_c"], 0.8);
    assert_eq!(fs::read_dir(d.path().join("search/local-search")).unwrap().count(), 2);
}
