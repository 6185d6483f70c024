use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(format!("{name}.json"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dendrite-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_on(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_exit_codes_per_fixture() {
    for (name, code) in [
        ("interval", 0),
        ("vicsek", 0),
        ("vicsek3d", 0),
        ("gasket", 1),
        ("overlap", 1),
    ] {
        assert_eq!(run_on("validate", name, &[]).status.code(), Some(code), "{name}");
    }
}

#[test]
fn valid_report_passes_every_condition() {
    let report = json(&run_on("validate", "vicsek", &[]));
    let conditions = report["perCondition"].as_array().unwrap();
    assert_eq!(conditions.len(), 6);
    assert!(conditions.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn gasket_reports_a_cycle() {
    let out = run_on("validate", "gasket", &[]);
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let d4 = report["perCondition"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["condition"] == "D4")
        .unwrap()
        .clone();
    assert_eq!(d4["status"], "fail");
    assert_eq!(d4["witness"]["kind"], "cycle");
}

#[test]
fn analysis_of_an_invalid_system_exits_one() {
    for cmd in ["analyze", "dims", "render", "tree"] {
        assert_eq!(run_on(cmd, "overlap", &[]).status.code(), Some(1), "{cmd}");
    }
}

#[test]
fn dims_reports_closed_forms() {
    let out = run_on("dims", "vicsek", &["--cover-depths", "1,2,3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!((r["dimK"].as_f64().unwrap() - 1.464974).abs() < 1e-6);
    let upper = r["dimTreeUpper"].as_array().unwrap();
    let two = upper.iter().find(|c| c["depth"] == 2).unwrap();
    assert!((two["dim"].as_f64().unwrap() - 1.289450).abs() < 1e-6);
    assert_eq!(two["size"], 17);
}

#[test]
fn analyze_lists_orders() {
    let out = run_on("analyze", "vicsek", &["--depth", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let orders = json(&out)["orders"].as_array().unwrap().clone();
    assert_eq!(orders.len(), 13);
    let near_center = |o: &&Value| {
        let p = o["point"].as_array().unwrap();
        p.iter().all(|c| (c.as_f64().unwrap() - 0.5).abs() < 1e-9)
    };
    let center = orders.iter().find(near_center).unwrap();
    assert_eq!(center["orderInK"], 4);
    assert_eq!(center["classification"], "RamificationPoint");
}

#[test]
fn render_and_tree_write_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("v.svg");
    let out = run_on("render", "vicsek", &["--out", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&svg).unwrap().matches("<polygon").count(), 25);

    let obj = dir.path().join("c.obj");
    assert_eq!(
        run_on("render", "vicsek3d", &["--out", obj.to_str().unwrap()])
            .status
            .code(),
        Some(0)
    );
    assert!(std::fs::read_to_string(&obj)
        .unwrap()
        .lines()
        .any(|l| l.starts_with("f ")));

    let graph = dir.path().join("t.json");
    let out = run_on("tree", "interval", &["--depth", "3", "--out", graph.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let t: Value = serde_json::from_str(&std::fs::read_to_string(&graph).unwrap()).unwrap();
    assert_eq!(t["nodes"].as_array().unwrap().len(), 9);
    assert_eq!(t["edges"].as_array().unwrap().len(), 8);
    assert_eq!(
        std::fs::read_to_string(graph.with_extension("svg"))
            .unwrap()
            .matches("<rect")
            .count(),
        8
    );
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        r#"{ "name": "x", "dimension": 1, "polyhedron": { "vertices": [[0],[1]] } }"#,
    )
    .unwrap();
    let out = run(&["validate", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("maps"));

    assert_eq!(run(&["validate", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(run(&["explode"]).status.code(), Some(2));
    assert_eq!(
        run_on("validate", "vicsek", &["--tolerance", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(run_on("validate", "vicsek", &["--depth", "x"]).status.code(), Some(2));
    assert_eq!(
        run_on("tree", "vicsek", &["--depth", "12", "--budget", "1000"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("validate"));
}
