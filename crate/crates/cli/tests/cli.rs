use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinaddr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinaddr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, json: &str) -> String {
    let p = dir.join("run.json");
    fs::write(&p, json).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn drive_report_defaults() {
    let o = spinaddr(&["drive"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("Omega = 0.625000000000 MHz"), "{s}");
    assert!(s.contains("T     = 2.51327412287 us"));
    assert_eq!(s.lines().filter(|l| l.starts_with(char::is_numeric)).count(), 10);
}

#[test]
fn swap_report_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = spinaddr(&["swap"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("n = 3"));
    let cfg = write_config(dir.path(), r#"{"delta_ez_mhz": 0}"#);
    let o = spinaddr(&["swap", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("phi = 0 "));
}

#[test]
fn plan_fixture_prints_bookkeeping() {
    let o = spinaddr(&["plan", "--fixture-table1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("8  (Y_{-φ} X_{-θ} Y_{φ} X_{θ})_1 I_2 I_3 I_4 I_5 I_6"), "{s}");
    assert!(s.contains("quarter-turn swap accounting) = 10.69"));
}

#[test]
fn plan_on_sampled_array() {
    let o = spinaddr(&["plan", "--seed", "11", "--qubits", "8", "--target", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("target site 3"));
    let o = spinaddr(&["plan", "--qubits", "4", "--target", "9"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n_qubits_list": [2, 6], "n_configs": 300, "seed": 5}"#);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (out, workers) in [(&a, "1"), (&b, "0")] {
        let o = spinaddr(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", workers]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "n_qubits,f_avg_sequence,f_avg_sequence_weighted,f_avg_simple,stderr_sequence,stderr_simple,n_configs,seed"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("6,") && lines[2].ends_with(",300,5"));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n_qubits_list": [3], "n_configs": 50, "seed": 5}"#);
    let out = dir.path().join("s.csv");
    let o = spinaddr(&["sweep", "--config", &cfg, "--seed", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(fs::read_to_string(&out).unwrap().lines().nth(1).unwrap().ends_with(",50,9"));
}

#[test]
fn config_errors_exit_1_and_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("never.csv");
    for (json, field) in [
        (r#"{"sigma_mhz": 0}"#, "sigma_mhz"),
        (r#"{"ell": -2}"#, "ell"),
        (r#"{"n_configs": 0}"#, "n_configs"),
        (r#"{"colour": "red"}"#, "colour"),
    ] {
        let cfg = write_config(dir.path(), json);
        let o = spinaddr(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(1), "{json}");
        assert!(stderr(&o).contains(field), "{json}: {}", stderr(&o));
    }
    let o = spinaddr(&["drive", "--estimator", "median"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("estimator"));
    let o = spinaddr(&["drive", "--config", "/definitely/missing.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!out.exists());
}

#[test]
fn unwritable_output_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"n_qubits_list": [2], "n_configs": 10}"#);
    let out = dir.path().join("missing-dir").join("s.csv");
    let o = spinaddr(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
}
