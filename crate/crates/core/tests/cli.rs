//! The `quadnn` binary: subcommands, outputs and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_quadnn"))
}

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

/// Writes an edited copy of a bundled file into `dir`.
fn edited(dir: &Path, name: &str, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(scenario_path(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(format!("{name}_edited.json"));
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn run_writes_log_and_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "wind_sinusoid", |v| v["duration"] = 1.0.into());
    let out = dir.path().join("out");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--variant", "adaptive"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("log.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# quadnn-simlog v1"));
    assert!(lines.next().unwrap().starts_with("t,x1,x2,x3"));
    assert_eq!(lines.count(), 401);
    let metrics = fs::read_to_string(out.join("metrics.txt")).unwrap();
    assert!(metrics.contains("variant adaptive") && metrics.contains("max_e_x"));
}

#[test]
fn seed_override_changes_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "wind_sinusoid", |v| v["duration"] = 0.5.into());
    let logs: Vec<String> = ["1", "2", "1"]
        .iter()
        .enumerate()
        .map(|(i, seed)| {
            let out = dir.path().join(format!("o{i}"));
            let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", seed]);
            assert_eq!(o.status.code(), Some(0));
            fs::read_to_string(out.join("log.csv")).unwrap()
        })
        .collect();
    assert_ne!(logs[0], logs[1]);
    assert_eq!(logs[0], logs[2]);
}

#[test]
fn missing_gain_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "hover", |v| {
        v["gains"].as_object_mut().unwrap().remove("k_x");
    });
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gains.k_x"), "{}", stderr(&o));
}

#[test]
fn zero_duration_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "hover", |v| v["duration"] = 0.0.into());
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("duration"));
}

#[test]
fn runtime_abort_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "hover", |v| v["b1_bound"] = 1.0.into());
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("aborted"));
}

#[test]
fn unknown_variant_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scenario_path("hover");
    let o = run(&["compare", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--variant", "baseline", "pid"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pid"));
}

#[test]
fn identical_variants_give_identical_logs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "wind_sinusoid", |v| v["duration"] = 1.0.into());
    let out = dir.path().join("cmp");
    let o = run(&["compare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--variant", "adaptive", "adaptive"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = fs::read(out.join("log_0_adaptive.csv")).unwrap();
    let b = fs::read(out.join("log_1_adaptive.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn compare_table_ranks_adaptive_ahead_in_wind() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited(dir.path(), "wind_sinusoid", |v| v["duration"] = 10.0.into());
    let out = dir.path().join("cmp");
    let o = run(&["compare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = fs::read_to_string(out.join("compare.txt")).unwrap();
    let late = |variant: &str| -> f64 {
        let row = table.lines().find(|l| l.split_whitespace().nth(1) == Some(variant)).unwrap();
        row.split_whitespace().nth(4).unwrap().parse().unwrap()
    };
    assert!(late("adaptive") < late("baseline"), "{table}");
    assert_eq!(String::from_utf8_lossy(&o.stdout), table);
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let a = |name: &str| run(&["audit", "--config", scenario_path(name).to_str().unwrap()]);

    let o = a("audit_high_gain");
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("radius"));

    let o = a("audit_reference");
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8_lossy(&o.stdout).into_owned();
    for m in ["M11", "M22", "N1 ", "N3 "] {
        assert!(text.contains(m), "{m} missing");
    }

    let o = a("audit_zero_uncertainty");
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("radius  0.000000e0"));

    let c1 = edited(dir.path(), "audit_reference", |v| v["c1"] = 10.0.into());
    let o = run(&["audit", "--config", c1.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL c1"));
    let csv = fs::read_to_string(dir.path().join("audit.csv")).unwrap();
    assert!(csv.starts_with("# quadnn-audit v1\n"));
    assert!(csv.contains("\nc1,10,"));

    let psi = edited(dir.path(), "audit_high_gain", |v| v["psi_1"] = 2.0.into());
    assert_eq!(run(&["audit", "--config", psi.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn bad_invocation_exits_two() {
    assert_eq!(run(&["fly"]).status.code(), Some(2));
    assert_eq!(run(&["run"]).status.code(), Some(2));
    let o = run(&["run", "--config", "/nonexistent/cfg.json"]);
    assert_eq!(o.status.code(), Some(2));
}
