//! End-to-end checks of the `oodlab` binary: registry listing, run output
//! files, determinism across reruns, override validation, and report
//! rendering.

use std::path::Path;
use std::process::{Command, Output};

fn oodlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oodlab"))
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Record JSON with the wall-clock field zeroed, for byte comparison.
fn canonical_record(path: &Path) -> String {
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    v["wall_ms"] = serde_json::json!(0);
    serde_json::to_string_pretty(&v).unwrap()
}

#[test]
fn list_names_every_experiment() {
    let out = oodlab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    for id in [
        "exp11", "exp12", "exp13", "exp21", "exp22", "exp31", "exp31_sigma_sweep",
        "exp32_battery", "exp4a", "exp4b", "exp4c", "exp4d",
    ] {
        assert!(text.contains(id), "list output missing {id}:\n{text}");
    }
}

#[test]
fn run_writes_records_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let second = dir.path().join("second");

    for out_dir in [&first, &second] {
        let out = oodlab()
            .args(["run", "exp22", "--seeds", "2", "--out"])
            .arg(out_dir)
            .output()
            .unwrap();
        assert!(out.status.success(), "run failed: {}", stderr(&out));
        assert!(out_dir.join("exp22.json").exists());
        assert!(out_dir.join("exp22.csv").exists());
    }

    assert_eq!(
        canonical_record(&first.join("exp22.json")),
        canonical_record(&second.join("exp22.json")),
        "rerun of the same config produced a different record"
    );
    assert_eq!(
        std::fs::read_to_string(first.join("exp22.csv")).unwrap(),
        std::fs::read_to_string(second.join("exp22.csv")).unwrap()
    );
}

#[test]
fn run_respects_out_env_default() {
    let dir = tempfile::tempdir().unwrap();
    let out = oodlab()
        .args(["run", "exp32_battery"])
        .env("OODLAB_OUT", dir.path())
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "run failed: {}", stderr(&out));
    assert!(dir.path().join("exp32_battery.json").exists());
}

#[test]
fn run_rejects_unknown_override_key() {
    let out = oodlab()
        .args(["run", "exp22", "--set", "bogus=1"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    let text = stderr(&out);
    assert!(text.contains("bogus"), "error does not name the key:\n{text}");
    assert!(text.contains("n"), "error does not list allowed keys:\n{text}");
}

#[test]
fn run_rejects_malformed_override() {
    let out = oodlab()
        .args(["run", "exp22", "--set", "sigma"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("key=value"));
}

#[test]
fn run_rejects_unknown_experiment() {
    let out = oodlab().args(["run", "exp99"]).output().unwrap();
    assert!(!out.status.success());
}

#[test]
fn report_renders_markdown_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run_out = oodlab()
        .args(["run", "exp32_battery", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(run_out.status.success(), "run failed: {}", stderr(&run_out));

    let md = oodlab().arg("report").arg(dir.path()).output().unwrap();
    assert!(md.status.success());
    let text = stdout(&md);
    assert!(text.contains("exp32_battery"), "markdown missing id:\n{text}");
    assert!(text.contains('|'), "markdown has no table");

    let csv = oodlab()
        .arg("report")
        .arg(dir.path())
        .args(["--format", "csv"])
        .output()
        .unwrap();
    assert!(csv.status.success());
    assert!(stdout(&csv).lines().count() > 2, "csv is empty");
}
