//! End-to-end checks of the `ewens` binary: output shapes, exit codes, and
//! byte-level determinism.

use std::io::Write;
use std::process::{Command, Output};

fn ewens(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ewens"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn tau_exact_json_and_determinism() {
    let args = ["tau", "--n", "10", "--theta", "1", "--format", "json"];
    let first = ewens(&args);
    assert!(first.status.success());
    let v: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert_eq!(v["tau_closed"], "3/2");
    assert_eq!(v["one_plus_theta_mu2"], "3/2");
    assert_eq!(v["rayleigh_at_extremal"], "3/2");
    assert_eq!(v["verdict"], "pass");

    let second = ewens(&args);
    assert_eq!(first.stdout, second.stdout, "byte-identical reruns");
}

#[test]
fn tau_rejects_bad_parameters() {
    assert!(!ewens(&["tau", "--n", "10", "--theta", "0"])
        .status
        .success());
    assert!(!ewens(&["tau", "--n", "1", "--theta", "1"]).status.success());
    // decimal literal in forced exact mode
    let out = ewens(&["tau", "--n", "4", "--theta", "0.5", "--mode", "exact"]);
    assert!(!out.status.success());
}

#[test]
fn tau_grid_sweeps_cells() {
    let out = ewens(&[
        "tau", "--n", "2", "--theta", "1", "--grid", "2-4:1,2", "--format", "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "pass");
    }
}

#[test]
fn spectrum_exact_and_float() {
    let out = ewens(&["spectrum", "--n", "5", "--theta", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("n,theta,r,mu_closed,mu_numeric,abs_err\n"));
    assert!(text.contains("5,1,3,-1/3,,"));

    let out = ewens(&[
        "spectrum", "--n", "12", "--theta", "0.7", "--format", "json",
    ]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["abs_err"].as_f64().unwrap() < 1e-8);
    }
}

#[test]
fn matrix_kernel_golden_bytes() {
    let out = ewens(&["matrix", "--n", "2", "--theta", "2", "--which", "kernel"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "-1/3,-2/3\n-2/3,-1/3\n");

    let out = ewens(&[
        "matrix",
        "--n",
        "3",
        "--theta",
        "1",
        "--which",
        "triangular",
    ]);
    assert_eq!(stdout(&out), "-1,-1,-1/3\n0,1/2,1/3\n0,0,-1/3\n");
}

#[test]
fn hahn_table_golden_bytes() {
    let out = ewens(&["hahn", "--n", "3", "--theta", "1"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "j,q0,q1,q2\n1,1,1,1\n2,1,1/4,-1\n3,1,-1/2,1/3\npi_sq,6,15/8,10/3\n"
    );
}

#[test]
fn identities_pass_and_emit_records() {
    let out = ewens(&[
        "identities",
        "--n",
        "5",
        "--theta",
        "1/2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let mut saw_cross_relation = false;
    for line in stdout(&out).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["holds"], true, "identity {line}");
        if v["identity"] == "3f2_cross_relation" {
            saw_cross_relation = true;
            assert_eq!(v["lhs"], v["rhs"]);
        }
    }
    assert!(saw_cross_relation);
    // exact-only suites refuse float theta
    assert!(!ewens(&["identities", "--n", "5", "--theta", "0.5"])
        .status
        .success());
}

#[test]
fn verify_all_suites() {
    let out = ewens(&[
        "verify",
        "--suites",
        "spectral,hahn,identities,oracle,remark",
        "--n",
        "6",
        "--theta",
        "1/2",
        "--vectors",
        "10",
    ]);
    assert!(out.status.success(), "{}", stdout(&out));
    assert!(
        !ewens(&["verify", "--suites", "bogus", "--n", "4", "--theta", "1"])
            .status
            .success()
    );
    assert!(
        !ewens(&["verify", "--suites", "", "--n", "4", "--theta", "1"])
            .status
            .success()
    );
}

#[test]
fn verify_grid_json_lines() {
    let out = ewens(&[
        "verify",
        "--suites",
        "spectral",
        "--n",
        "2",
        "--theta",
        "1",
        "--grid",
        "2-5:1/2,1",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    // 4 n-values x 2 thetas x 5 spectral checks
    assert_eq!(lines.len(), 40);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["holds"], true);
    }
}

#[test]
fn oracle_exact_agreement() {
    let out = ewens(&[
        "oracle",
        "--n",
        "4",
        "--theta",
        "2",
        "--vectors",
        "8",
        "--seed",
        "5",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("esf_normalization"));
    assert!(text.contains("permutation_measure"));
}

#[test]
fn sample_runs_and_is_deterministic() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    for j in 1..=20 {
        writeln!(file, "{}", (j as f64).ln()).unwrap();
    }
    let path = file.path().to_str().unwrap();
    let args = [
        "sample",
        "--n",
        "20",
        "--theta",
        "1.0",
        "--count",
        "20000",
        "--seed",
        "11",
        "--streams",
        "4",
        "--weights-file",
        path,
        "--format",
        "json",
    ];
    let first = ewens(&args);
    assert!(first.status.success(), "{}", stdout(&first));
    let v: serde_json::Value = serde_json::from_str(stdout(&first).trim()).unwrap();
    assert!(v["var_z"].as_f64().unwrap() <= 4.0);
    let second = ewens(&args);
    assert_eq!(first.stdout, second.stdout);

    // count floor and dimension mismatch
    assert!(!ewens(&[
        "sample",
        "--n",
        "20",
        "--theta",
        "1.0",
        "--count",
        "1",
        "--seed",
        "1",
        "--weights-file",
        path,
    ])
    .status
    .success());
    assert!(!ewens(&[
        "sample",
        "--n",
        "19",
        "--theta",
        "1.0",
        "--count",
        "100",
        "--seed",
        "1",
        "--weights-file",
        path,
    ])
    .status
    .success());
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tau.json");
    let out = ewens(&[
        "tau",
        "--n",
        "6",
        "--theta",
        "7/3",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(text.trim()).unwrap();
    assert_eq!(v["tau_closed"], "13/10");
}
