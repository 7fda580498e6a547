use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use modmu::munit::MultUnitary;
use modmu::workbench::runner::read_operator;
use modmu::workbench::{cnot, ReportFile};

fn mu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mu")).args(args).output().expect("mu runs")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn gen_writes_the_kt_unitary_to_stdout() {
    let out = mu(&["gen", "--cyclic", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let op = modmu::tensor::io::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(&op, cnot().op());
}

#[test]
fn binary_output_needs_a_file() {
    let out = mu(&["gen", "--cyclic", "2", "--format", "bin"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("--out"));
}

#[test]
fn gen_from_a_csv_table_matches_the_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let table = modmu::workbench::GroupTable::klein().to_csv();
    fs::write(dir.path().join("k.csv"), table).unwrap();
    let (a, b) = (path(dir.path(), "a.bin"), path(dir.path(), "b.bin"));
    assert!(mu(&["gen", "--table", &path(dir.path(), "k.csv"), "--format", "bin", "--out", &a]).status.success());
    assert!(mu(&["gen", "--klein", "--format", "bin", "--out", &b]).status.success());
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(MultUnitary::new(read_operator(Path::new(&a)).unwrap()).is_ok());
}

#[test]
fn invalid_input_goes_to_stderr_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.csv"), "0,1\n1,1\n").unwrap();
    let table = path(dir.path(), "bad.csv");
    let missing = path(dir.path(), "x");
    for args in [
        vec!["gen", "--table", &table],
        vec!["gen", "--diag", "1,-1"],
        vec!["gen", "--symmetric", "7"],
        vec!["check", "pentagon", "--tol=0", &missing],
    ] {
        let out = mu(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("mu: "), "{args:?}");
    }
}

#[test]
fn manageable_check_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let (w, q) = (path(dir.path(), "w.json"), path(dir.path(), "q.json"));
    mu(&["gen", "--cyclic", "3", "--out", &w]);
    mu(&["gen", "--diag", "1,1,1", "--out", &q]);
    let out = mu(&["check", "manageable", &w, "--q", &q]);
    assert_eq!(out.status.code(), Some(0));
    let report: ReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report.is_pass());
    assert_eq!(report.sections[0].title, "manageable");
}

#[test]
fn extract_and_certificate_write_their_files() {
    let dir = tempfile::tempdir().unwrap();
    let w = path(dir.path(), "w.json");
    mu(&["gen", "--cyclic", "3", "--out", &w]);
    let cert_dir = path(dir.path(), "cert");
    let out = mu(&["certificate", &w, "--format", "bin", "--out", &cert_dir]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["certificate.json", "certificate.md", "q.bin", "qhat.bin"] {
        assert!(dir.path().join("cert").join(f).exists(), "{f}");
    }
    let (q, qhat) = (path(dir.path(), "cert/q.bin"), path(dir.path(), "cert/qhat.bin"));
    let ex = path(dir.path(), "ex");
    assert_eq!(mu(&["extract", &w, "--q", &q, "--qhat", &qhat, "--out", &ex]).status.code(), Some(0));
    let data = modmu::qgroup::QGData::from_json(&fs::read_to_string(dir.path().join("ex/qgdata.json")).unwrap()).unwrap();
    assert_eq!(data.algebra.rank, 3);
    assert!(fs::read_to_string(dir.path().join("ex/report.md")).unwrap().contains("| A | 3 |"));
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = path(dir.path(), "cfg.json");
    fs::write(&cfg, r#"{"probes": 4, "seed": 9, "refinements": 0}"#).unwrap();
    let (w, i, d) = (path(dir.path(), "w.json"), path(dir.path(), "i.json"), path(dir.path(), "d.json"));
    mu(&["gen", "--cyclic", "2", "--out", &w]);
    mu(&["gen", "--diag", "1,1", "--out", &i]);
    mu(&["gen", "--diag", "1,2", "--out", &d]);
    let out = mu(&["modify", &w, "--q", &i, "--qhat", &d, "--config", &cfg, "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report: ReportFile = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((report.config.probes, report.config.seed, report.config.refinements), (4, 3, 0));
    fs::write(&cfg, r#"{"probes": 4, "typo": 1}"#).unwrap();
    assert_eq!(mu(&["report", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn report_markdown_lists_negative_controls() {
    let out = mu(&["report", "--probes", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let md = String::from_utf8(out.stdout).unwrap();
    assert!(md.contains("- verdict: PASS"));
    assert!(md.contains("## perturbed Z2 pentagon\n\nexpected: fail, observed: fail, as expected"));
    assert!(!md.contains("UNEXPECTED"));
}
