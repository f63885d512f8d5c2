//! End-to-end checks of the `solve` subcommand: a coarse disk cell must
//! produce a parsable summary whose invariants match the library's.

use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bubblelab"))
}

#[test]
fn solve_emits_a_consistent_summary() {
    let out = binary()
        .args(["solve", "--domain", "disk:1", "--p", "3", "--h", "0.15"])
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    assert_eq!(summary["p"], 3.0);
    let sup = summary["sup_norm"].as_f64().unwrap();
    assert!(sup > 3.0 && sup < 4.0, "amplitude {sup} out of range");
    assert!(summary["pde_residual"].as_f64().unwrap() < 1e-8);
    let max_point = summary["max_point"].as_array().unwrap();
    for coord in max_point {
        assert!(coord.as_f64().unwrap().abs() < 0.2, "peak off-center");
    }
}

#[test]
fn artifacts_are_written_and_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = binary()
            .args(["solve", "--domain", "square:1", "--p", "4", "--h", "0.2"])
            .arg("--out")
            .arg(dir.path())
            .output()
            .expect("binary runs");
        assert!(out.status.success());
    }
    for name in ["solution.csv", "summary.json"] {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{name} differs between identical runs");
    }
    let csv = std::fs::read_to_string(dir_a.path().join("solution.csv")).unwrap();
    assert!(csv.starts_with("x,y,u\r\n"), "missing CRLF header");
}

#[test]
fn malformed_domains_are_rejected_with_context() {
    let out = binary()
        .args(["solve", "--domain", "triangle:1"])
        .output()
        .expect("binary runs");
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("triangle"), "error does not name the input: {err}");
}
