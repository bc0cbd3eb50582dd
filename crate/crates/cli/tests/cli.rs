use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_outlier-lab"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn ptd_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["ptd", "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(dir.path().join("ptd.csv")).unwrap();
    assert!(csv.starts_with("experiment_id,series,x,x2,y,y_err\n"));
    assert!(!dir.path().join("ptd.svg").exists());
    let s = summary(dir.path());
    assert_eq!(s["all_passed"], true);
    assert_eq!(s["ptd.gain_power_tail"], "pass");
    assert_eq!(s["seed"], 42);
}

#[test]
fn thread_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(a.path(), &["fig2", "--m", "50", "--seed", "9", "--threads", "1"]);
    run(b.path(), &["fig2", "--m", "50", "--seed", "9", "--threads", "3"]);
    let read = |d: &Path| fs::read(d.join("fig2.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
    assert!(a.path().join("fig2.svg").exists());
}

#[test]
fn fig3_surface_grid_option() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["fig3", "--grid", "3"]);
    assert!(out.status.code().is_some_and(|c| c <= 1));
    let csv = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| l.starts_with("fig3,limit_prob,")).count(), 9);
    let svg = fs::read_to_string(dir.path().join("fig3.svg")).unwrap();
    assert!(svg.contains("<svg"));
    let s = summary(dir.path());
    assert!(s["fig3.surface_below_observed"] == "pass" || s["fig3.surface_below_observed"] == "fail");
}

#[test]
fn bad_flags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["fig1", "--m", "1"][..],
        &["fig1", "--threads", "zero"],
        &["fig1", "--format", "png"],
        &["nope"],
    ] {
        let out = run(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"), "{args:?}");
    }
    let out = run(dir.path(), &["fig1", "--m", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("taken");
    fs::write(&file, "").unwrap();
    let out = run(&file, &["ptd"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}
