//! End-to-end driver tests: exit codes, emitted file shapes, and
//! byte-for-byte determinism across repeated runs.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinshell")).args(args).output().expect("binary runs")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn identical_config_gives_byte_identical_outputs() {
    let base = tempfile::tempdir().unwrap();
    let (a, b) = (base.path().join("a"), base.path().join("b"));
    for out in [&a, &b] {
        let st = run(&[
            "--model",
            "2",
            "--L",
            "12",
            "--n-up",
            "4",
            "--mu",
            "0.5",
            "--lambda",
            "1.0",
            "--analysis",
            "all",
            "--emit-matrix",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(st.status.success(), "{}", String::from_utf8_lossy(&st.stderr));
    }
    let names = [
        "spacings.csv",
        "ps_hist.csv",
        "sf_model2_lambda1.csv",
        "ef_shell_model2_lambda1.csv",
        "quench_model2_lambda1.csv",
        "summary.json",
        "hamiltonian.bin",
    ];
    for name in names {
        assert_eq!(read(&a, name), read(&b, name), "{name} differs between runs");
    }
}

#[test]
fn emitted_tables_have_documented_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--model",
        "2",
        "--L",
        "12",
        "--n-up",
        "4",
        "--analysis",
        "all",
        "--lambda-grid",
        "0.2:1.0:0.2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let spacings = String::from_utf8(read(dir.path(), "spacings.csv")).unwrap();
    let mut lines = spacings.lines();
    assert_eq!(lines.next(), Some("s"));
    assert!(lines.count() > 100, "expected a few hundred spacings at N=255");

    let hist = String::from_utf8(read(dir.path(), "ps_hist.csv")).unwrap();
    let mut lines = hist.lines();
    assert_eq!(lines.next(), Some("bin_center,density,brody_fit,poisson,wigner"));
    assert_eq!(lines.count(), 40);

    let crit = String::from_utf8(read(dir.path(), "criticality.csv")).unwrap();
    let mut lines = crit.lines();
    assert_eq!(lines.next(), Some("param,mean_v_over_d,M_over_N"));
    assert_eq!(lines.count(), 5);

    let quench = String::from_utf8(read(dir.path(), "quench_model2_lambda1.csv")).unwrap();
    assert_eq!(
        quench.lines().next(),
        Some("t,sigma_t,W_num,W_gauss,S_num,S_analytic,S_linear")
    );

    let summary: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["schema"], 1);
    assert_eq!(summary["N"], 255);
    assert!(summary["stats"]["beta"].is_f64());
    assert!(summary["critical"]["crossing"].is_array());
    assert!(summary["quench"]["n_pc_time"].is_f64());
    assert_eq!(summary["sf"]["preferred"], "gaussian");
}

#[test]
fn config_errors_exit_2() {
    let cases: &[&[&str]] = &[
        &["--model", "3"],
        &["--model", "1", "--mu", "1"],
        &["--model", "1", "--analysis", "critical"],
        &["--model", "2", "--lambda-grid", "junk", "--analysis", "critical"],
        &["--model", "1", "--L", "10", "--n-up", "11"],
    ];
    for args in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failures_exit_3() {
    // 15 levels cannot survive edge truncation for unfolding.
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--model",
        "1",
        "--L",
        "6",
        "--mu",
        "0.5",
        "--analysis",
        "stats",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient levels"));
}

#[test]
fn exact_degeneracies_warn_but_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--model",
        "1",
        "--L",
        "12",
        "--mu",
        "0",
        "--analysis",
        "stats",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
    assert!(dir.path().join("spacings.csv").exists());
    assert!(!dir.path().join("ps_hist.csv").exists());
    let summary: serde_json::Value =
        serde_json::from_slice(&read(dir.path(), "summary.json")).unwrap();
    assert_eq!(summary["stats"]["degenerate"], true);
}

#[test]
fn config_file_supplies_defaults_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    fs::write(&conf, "model=1\nL=12\nmu=1.5\nanalysis=stats\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&[
        "--config",
        conf.to_str().unwrap(),
        "--mu",
        "0.5",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&read(&out_dir, "summary.json")).unwrap();
    assert_eq!(summary["mu"], 0.5);
    assert_eq!(summary["L"], 12);
}
