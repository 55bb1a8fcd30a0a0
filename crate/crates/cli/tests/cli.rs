//! End-to-end tests of the binary: stdout shapes, exit codes, config
//! precedence, byte determinism, and manifests.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qroots"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).to_string()
}

fn tmpfile(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qroots-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn rho_prints_count() {
    let o = run(&["rho", "--a", "1", "--h", "1", "--k", "65"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "4");
}

#[test]
fn roots_prints_sorted_residues() {
    let o = run(&["roots", "--a", "1", "--h", "1", "--k", "65"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "8,18,47,57");
}

#[test]
fn heegner_prints_csv_rows() {
    let o = run(&["heegner", "--h", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "5,0,1\n3,1,2\n");
}

#[test]
fn verify_para3_passes_with_exit_zero() {
    let o = run(&[
        "verify-para3",
        "--a",
        "1",
        "--h",
        "2",
        "--y",
        "2",
        "--bound",
        "50",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("pass"));
}

#[test]
fn unknown_subcommand_exits_2_with_usage() {
    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.to_lowercase().contains("usage"), "stderr: {err}");
}

#[test]
fn invalid_arguments_exit_2() {
    let o = run(&["rho", "--a", "1", "--h", "1", "--k", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["rho", "--a", "1", "--h", "1"]); // missing k
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["type1", "--x", "100", "--k", "100", "--d", "50"]); // D > sqrt(X)
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let o = run(&[
        "rho",
        "--a",
        "1",
        "--h",
        "1",
        "--k",
        "65",
        "--out",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn config_file_supplies_and_flags_override() {
    let cfg = tmpfile("cfg");
    std::fs::write(&cfg, "# params\na = 1\nh = 1\nk = 10\n").unwrap();
    let o = run(&["rho", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "2"); // roots of v^2+1 mod 10: {3, 7}
    let o = run(&["rho", "--config", cfg.to_str().unwrap(), "--k", "65"]);
    assert_eq!(stdout(&o).trim(), "4"); // flag overrides file
    std::fs::remove_file(&cfg).ok();
}

#[test]
fn csv_output_is_deterministic_across_thread_counts() {
    let out1 = tmpfile("t1.csv");
    let out2 = tmpfile("t2.csv");
    let base = [
        "type1", "--x", "300", "--k", "300", "--d", "8", "--a", "1", "--h", "5",
    ];
    let o = bin()
        .args(base)
        .args(["--threads", "1", "--out", out1.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin()
        .args(base)
        .args(["--threads", "2", "--out", out2.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let b1 = std::fs::read(&out1).unwrap();
    let b2 = std::fs::read(&out2).unwrap();
    assert_eq!(b1, b2, "outputs differ between thread counts");
    assert!(b1.starts_with(b"cell,exact_count,main_term,error\n"));
    assert!(!b1.contains(&b'\r'));
    std::fs::remove_file(&out1).ok();
    std::fs::remove_file(&out2).ok();
}

#[test]
fn json_roundtrips_and_manifest_digests_are_stable() {
    let json1 = tmpfile("r1.json");
    let json2 = tmpfile("r2.json");
    let man1 = tmpfile("m1.json");
    let man2 = tmpfile("m2.json");
    let base = [
        "verify-para1",
        "--a",
        "1",
        "--h",
        "1",
        "--d",
        "1",
        "--bound",
        "12",
    ];
    let o = bin()
        .args(base)
        .args([
            "--json",
            json1.to_str().unwrap(),
            "--manifest",
            man1.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success());
    let o = bin()
        .args(base)
        .args([
            "--json",
            json2.to_str().unwrap(),
            "--manifest",
            man2.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(o.status.success());

    // JSON parses back into the report type and the bytes are identical.
    let t1 = std::fs::read_to_string(&json1).unwrap();
    let t2 = std::fs::read_to_string(&json2).unwrap();
    assert_eq!(t1, t2);
    let parsed: serde_json::Value = serde_json::from_str(&t1).unwrap();
    assert_eq!(parsed["hits"], parsed["elements_enumerated"]);

    // Manifests agree on everything except wall time.
    let m1: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&man1).unwrap()).unwrap();
    let m2: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&man2).unwrap()).unwrap();
    assert_eq!(m1["subcommand"], "verify-para1");
    assert_eq!(m1["parameters"], m2["parameters"]);
    let d1 = m1["outputs"][0][1].as_str().unwrap();
    let d2 = m2["outputs"][0][1].as_str().unwrap();
    assert_eq!(d1, d2, "output digests differ between reruns");
    assert_eq!(d1.len(), 64);
    for f in [&json1, &json2, &man1, &man2] {
        std::fs::remove_file(f).ok();
    }
}

#[test]
fn equidist_emits_table() {
    let out = tmpfile("eq.csv");
    let o = bin()
        .args([
            "equidist",
            "--x",
            "2000",
            "--a",
            "1",
            "--h",
            "1",
            "--intervals",
            "4",
        ])
        .args(["--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("alpha,beta,count,expected,deviation\n"));
    assert_eq!(text.lines().count(), 5);
    std::fs::remove_file(&out).ok();
}

#[test]
fn chebyshev_reports_exact_identity() {
    let o = run(&["chebyshev", "--x", "50", "--a", "1", "--h", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("multisets_equal=true"));
}

#[test]
fn weyl_and_hypothesis_and_kernels_run() {
    let o = run(&["weyl", "--x", "500", "--a", "1", "--h", "1", "--m", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("terms="));

    let o = run(&[
        "hypothesis",
        "--a",
        "1",
        "--h",
        "1",
        "--y",
        "2",
        "--z",
        "500",
        "--eps",
        "0.2",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bound(eps=0.2)"));

    let o = run(&[
        "kernel-heegner",
        "--qlo",
        "2",
        "--qhi",
        "4",
        "--h",
        "5",
        "--z",
        "4",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ratio="));

    let o = run(&["kernel-lt", "--v", "2", "--z", "9", "--r", "1.0"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("cells=1"));
}

#[test]
fn gpf_and_cubic_experiments_run() {
    let o = run(&["gpf", "--x", "50", "--a", "1", "--h", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("max_gpf="));

    let o = run(&[
        "ypoisson", "--a", "1", "--b", "1", "--d", "30", "--bb", "500",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("complete_sum=30"));

    let o = run(&[
        "x2y3", "--x", "1000", "--k", "30", "--dmax", "5", "--biga", "31", "--bigb", "10",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("ratio="));
}
