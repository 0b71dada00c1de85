use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hyperthin(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperthin"))
        .args(args)
        .env("HYPERTHIN_OUT", out)
        .output()
        .expect("binary runs")
}

fn report(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn malformed_graph_exits_3_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("bad.graph");
    std::fs::write(&graph, "metricgraph v1 3\n# fine\n0 1 1.0\n1 two 4\n").unwrap();
    let o = hyperthin(
        &["analyze", "--input", graph.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(3));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4"), "{err}");

    // well-formed but invalid: a precondition error, not a parse error
    std::fs::write(&graph, "metricgraph v1 3\n0 1 1.0\n1 2 -4\n").unwrap();
    let o = hyperthin(
        &["analyze", "--input", graph.to_str().unwrap()],
        &dir.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn precondition_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperthin(&["analyze"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = hyperthin(
        &["tower", "--gen", "cycle:6", "--basepoint", "9"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = hyperthin(&["analyze", "--gen", "torus:3"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn euclid_reports_eta0() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperthin(&["euclid", "--grid-resolution", "100"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(dir.path());
    let res = &r["result"];
    for key in [
        "eta0",
        "alpha0",
        "sup_found",
        "argmax_angles",
        "grid_resolution",
        "tol",
    ] {
        assert!(!res[key].is_null(), "missing {key}");
    }
    let eta0 = res["eta0"].as_f64().unwrap();
    assert!((eta0 - 0.150141).abs() < 1e-6);
    assert!((res["sup_found"].as_f64().unwrap() - eta0).abs() < 1e-4);
}

#[test]
fn analyze_tree_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = hyperthin(
        &[
            "analyze",
            "--gen",
            "random_tree:200",
            "--samples",
            "3000",
            "--seed",
            "7",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let r = report(dir.path());
    assert_eq!(r["result"]["verdict"]["band"], "tree-consistent");
    assert_eq!(r["result"]["verdict"]["ratio_sup"].as_f64(), Some(0.0));
    assert_eq!(r["provenance"]["seed"].as_u64(), Some(7));
    for f in ["samples.csv", "buckets.csv", "profile.svg", "timing.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

#[test]
fn out_flag_overrides_env() {
    let dir = tempfile::tempdir().unwrap();
    let explicit = dir.path().join("explicit");
    let o = hyperthin(
        &[
            "cone",
            "--gen",
            "random_tree:60",
            "--samples",
            "200",
            "--out",
            explicit.to_str().unwrap(),
        ],
        &dir.path().join("env"),
    );
    assert!(o.status.success());
    assert!(explicit.join("cone.csv").exists());
    assert!(!dir.path().join("env").exists());
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for sub in [
        &["detour", "--gen", "grid_plane:20", "--samples", "300"][..],
        &[
            "analyze",
            "--gen",
            "hyperbolic_tessellation:3",
            "--samples",
            "800",
        ],
    ] {
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        let mut args = sub.to_vec();
        args.extend(["--seed", "11"]);
        assert!(hyperthin(&args, &a).status.success());
        assert!(hyperthin(&args, &b).status.success());
        let f = "report.json";
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap()
        );
    }
}
