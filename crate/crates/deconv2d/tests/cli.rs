//! End-to-end runs of the `deconv2d` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deconv2d")).args(args).output().expect("binary runs")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).expect("csv file");
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(str::to_string).collect()).collect();
    (header, rows)
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["certify", "--help"]).status.code(), Some(0));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["recover", "--delta", "abc"]).status.code(), Some(1));
    assert_eq!(run(&["recover", "--delta", "2", "--kernel", "lorentz"]).status.code(), Some(1));
    assert_eq!(run(&["envelopes", "--k1", "5", "--resolution", "zero", "--out", "x"]).status.code(), Some(1));
    let o = run(&["certify", "--delta-min", "5", "--delta-max", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta-min"));
}

#[test]
fn computation_errors_exit_two() {
    let o = run(&["certify", "--zeta-bands", "17", "--delta-min", "4", "--delta-max", "4"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join(deconv2d::cache::file_name(3, deconv2d_core::envelope::EnvelopeKind::B, 2, 2));
    std::fs::write(&bad, "ENVCACHE v0 k1=3\n").unwrap();
    let cache = dir.path().to_str().unwrap();
    for kind in deconv2d_core::envelope::EnvelopeKind::ALL {
        let p = dir.path().join(deconv2d::cache::file_name(3, kind, 2, 2));
        if !p.exists() {
            std::fs::write(p, "ENVCACHE v1\n").unwrap();
        }
    }
    let o = run(&["certify", "--zeta-bands", "3", "--resolution", "2", "--envelope-cache", cache, "--delta-min", "4", "--delta-max", "4"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("v0"));
}

#[test]
fn svd_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub/svd.csv");
    let o = run(&["svd", "--deltas", "0.5,2", "--zetas", "0.5", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let (header, rows) = read_csv(&out);
    assert_eq!(header, ["delta", "zeta", "sigma_min", "sigma_med"]);
    assert_eq!(rows.len(), 2);
    let small: f64 = rows[0][2].parse().unwrap();
    let large: f64 = rows[1][2].parse().unwrap();
    assert!(small < 1e-2 * large);
}

#[test]
fn envelopes_then_certify_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("env");
    let o = run(&["envelopes", "--k1", "5", "--resolution", "4", "--out", cache.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 14);
    let out = dir.path().join("cert.csv");
    let args = [
        "certify",
        "--zeta-bands",
        "5",
        "--resolution",
        "4",
        "--envelope-cache",
        cache.to_str().unwrap(),
        "--delta-min",
        "5.5",
        "--delta-max",
        "6",
        "--delta-step",
        "0.5",
        "--out",
        out.to_str().unwrap(),
    ];
    assert_eq!(run(&args).status.code(), Some(0));
    let (header, rows) = read_csv(&out);
    assert_eq!(header[..5], ["k1", "zeta_lo", "zeta_hi", "delta", "verdict"]);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][3], "6.0");
    assert!(rows.iter().all(|r| r[4] == "certified" || r[4] == "failed"));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# svd sweep\ndeltas = 2\nzetas = 0.5\n").unwrap();
    let out = dir.path().join("a.csv");
    let o = run(&["--config", cfg.to_str().unwrap(), "svd", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_csv(&out).1.len(), 1);
    let o = run(&["--config", cfg.to_str().unwrap(), "svd", "--deltas", "1,2,3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_csv(&out).1.len(), 3);
    std::fs::write(&cfg, "deltas\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "svd"]).status.code(), Some(1));
}

#[test]
fn recover_and_demo_to_stdout() {
    let o = run(&["recover", "--delta", "3", "--n-spikes", "4", "--trials", "2", "--kernel", "airy"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,zeta,kernel,pattern,trials,successes,rate"));
    assert_eq!(lines.next(), Some("3.0,0.5,airy,full_grid,2,2,1.0"));
    let o = run(&["certificate-demo", "--step", "0.5", "--seed", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("x,y,q\n"));
}
