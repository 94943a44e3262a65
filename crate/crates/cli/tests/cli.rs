use std::path::Path;
use std::process::{Command, Output};

fn rfim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rfim-lab")).args(args).env_remove("RFIM_LAB_WORKERS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(rfim(&["bogus"]).status.code(), Some(1));
    assert_eq!(rfim(&["mag", "--samples", "lots"]).status.code(), Some(1));
    assert_eq!(rfim(&["--help"]).status.code(), Some(0));
}

#[test]
fn violations_exit_two() {
    let o = rfim(&["grow", "--n", "64", "--eps", "1", "--delta", "8", "--n-star", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("triangle-outside-box"));
}

#[test]
fn runtime_errors_exit_three() {
    assert_eq!(rfim(&["grow", "--n", "16", "--m", "1.5"]).status.code(), Some(3));
    assert_eq!(rfim(&["curve", "nu", "--file", "/nonexistent/curve.txt"]).status.code(), Some(3));
    assert_eq!(rfim(&["animal", "exact", "--n", "2", "--max-size", "40"]).status.code(), Some(3));
}

#[test]
fn field_dump_round_trips_through_ground() {
    let dir = tempfile::tempdir().unwrap();
    let dump = path(dir.path(), "field.txt");
    let o = rfim(&["--seed", "4", "--out", &dump, "field", "--n", "2", "--eps", "0"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&dump).unwrap();
    assert!(text.starts_with("N=2 seed=4 eps=0"));
    assert_eq!(text.lines().count(), 26);
    let o = rfim(&["ground", "--n", "2", "--bc", "minus", "--field", &dump]);
    assert!(o.status.success());
    let out = stdout(&o);
    let rows: Vec<&str> = out.lines().skip(1).collect();
    assert_eq!(rows, vec!["-----"; 5]);
    // 20 boundary edges and 40 interior edges, all satisfied.
    assert!(out.starts_with("energy -6.0"));
}

#[test]
fn mag_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let a = path(dir.path(), "a.jsonl");
    let b = path(dir.path(), "b.jsonl");
    let csv = path(dir.path(), "s.csv");
    for (out, w) in [(&a, "1"), (&b, "3")] {
        let o = rfim(&["--seed", "9", "--workers", w, "--out", out, "mag", "--n", "2,4", "--samples", "20", "--summary", &csv]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let summary = std::fs::read_to_string(&csv).unwrap();
    assert!(summary.starts_with("N,eps,beta,samples,m_hat,stderr\n2,1.0,inf,20,"));
}

#[test]
fn config_file_drives_a_batch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "scan.cfg");
    std::fs::write(&cfg, "experiment=animal_scan\nN=2,3\nsamples=2\nbudget=200\nseed=5\n").unwrap();
    let out = path(dir.path(), "scan.jsonl");
    let o = rfim(&["--config", &cfg, "--out", &out, "animal"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 4);
    let fit = rfim(&["fit", "--records", &out]);
    // Two cells are too few for a fit.
    assert_eq!(fit.status.code(), Some(3));

    std::fs::write(&cfg, "experiment=animal_scan\nseed=5\ntypo=1\n").unwrap();
    assert_eq!(rfim(&["--config", &cfg, "animal"]).status.code(), Some(3));
    std::fs::write(&cfg, "experiment=mag\nseed=5\n").unwrap();
    assert_eq!(rfim(&["--config", &cfg, "animal"]).status.code(), Some(3));
}

#[test]
fn fit_reports_both_psi_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path(), "psi.jsonl");
    let o = rfim(&["--out", &out, "psi", "--eps", "2.5,2,1.5", "--samples", "40", "--n-max", "16", "--m", "0.8"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let fit = rfim(&["fit", "--records", &out]);
    let text = stdout(&fit);
    if fit.status.success() {
        assert_eq!(text.lines().count(), 2);
        assert!(text.contains("eps^(-4/3)") && text.contains("eps^(-2)"));
    } else {
        assert_eq!(fit.status.code(), Some(3));
    }
}

#[test]
fn grow_writes_report_and_polygon() {
    let dir = tempfile::tempdir().unwrap();
    let dump = path(dir.path(), "poly.txt");
    let o = rfim(&["--seed", "2", "grow", "--n", "256", "--eps", "0.5", "--dump", &dump]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["n_star"], 2);
    assert_eq!(report["sides"], 16);
    assert_eq!(report["violations"].as_array().unwrap().len(), 0);
    assert_eq!(std::fs::read_to_string(&dump).unwrap().lines().count(), 16);
}

#[test]
fn curve_commands() {
    let dir = tempfile::tempdir().unwrap();
    let file = path(dir.path(), "square.txt");
    std::fs::write(&file, "0 0\n2 0\n2 2\n0 2\n#closed\n").unwrap();
    assert_eq!(stdout(&rfim(&["curve", "winding", "--file", &file, "--x", "1", "--y", "1"])).trim(), "1");
    assert_eq!(stdout(&rfim(&["curve", "winding", "--file", &file, "--x", "-1", "--y", "1"])).trim(), "0");
    assert_eq!(rfim(&["curve", "winding", "--file", &file, "--x", "0", "--y", "1"]).status.code(), Some(3));
    let area: f64 = stdout(&rfim(&["curve", "nu", "--file", &file])).trim().parse().unwrap();
    assert_eq!(area, 4.0);
    let o = rfim(&["curve", "check", "--suite", "splitting", "--trials", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("\"violations\":0"));
}

#[test]
fn animal_commands() {
    let o = rfim(&["--seed", "3", "animal", "exact", "--n", "1", "--max-size", "4", "--class", "connected"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let head: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
    assert_eq!(head.len(), 3);
    let size: usize = head[2].parse().unwrap();
    assert_eq!(text.lines().nth(1).unwrap().split(';').count(), size);
    let c = rfim(&["--seed", "3", "animal", "certificate", "--n", "3", "--eps", "0"]);
    assert_eq!(stdout(&c).trim(), "none");
}
