use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(args: &[&str], dir: &Path) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_minorfolio")).args(args).current_dir(dir).output().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

#[test]
fn gamma_hat_pattern_is_vital() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["gen", "gamma-hat", "--k", "2", "-o", "g.el"], dir.path());
    assert_eq!(code, 0);
    assert!(dir.path().join("g.pat").exists());
    let (code, v) = run(&["vital", "--graph", "g.el", "--pattern", "g.pat"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["vital"], Value::Bool(true));
    assert!(v["linkage"].is_array());
}

#[test]
fn generated_graphs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[&[&str]] = &[
        &["gen", "grid", "--n", "3", "--m", "4"],
        &["gen", "wall", "--n", "3"],
        &["gen", "cyl-mesh", "--n", "4", "--m", "3"],
        &["gen", "railed-annulus", "--w", "2", "--r", "4"],
        &["gen", "z-graph", "--s", "2"],
        &["gen", "gnp", "--n", "9", "--p", "0.4", "--seed", "7"],
    ];
    for args in cases {
        let mut a = args.to_vec();
        a.extend(["-o", "x.el"]);
        let (code, _) = run(&a, dir.path());
        assert_eq!(code, 0, "{args:?}");
        let text = std::fs::read_to_string(dir.path().join("x.el")).unwrap();
        let g = minorfolio::graph::parse_edge_list(&text).unwrap();
        assert_eq!(minorfolio::graph::to_edge_list(&g), text, "{args:?}");
    }
}

#[test]
fn gnp_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run(&["gen", "gnp", "--n", "10", "--p", "0.5", "--seed", "3"], dir.path());
    let (_, b) = run(&["gen", "gnp", "--n", "10", "--p", "0.5", "--seed", "3"], dir.path());
    assert_eq!(a, b);
}

#[test]
fn folio_engines_agree() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "gamma-hat", "--k", "2", "-o", "g.el"], dir.path());
    let (code, v) = run(&["folio", "--graph", "g.el", "--roots", "0,2", "--d", "1", "--engine", "both"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["equal"], Value::Bool(true));
    let (code, v) = run(&["folio", "--graph", "g.el", "--red", "0,2,6,8", "--k", "2", "--d", "1", "--engine", "both"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["equal"], Value::Bool(true));
}

#[test]
fn treewidth_and_td_output() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "gamma-hat", "--k", "2", "-o", "g.el"], dir.path());
    let (code, v) = run(&["tw", "--graph", "g.el", "--exact", "--td-out", "g.td"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["exact_width"], 3);
    let (code, v) = run(&["dp", "--graph", "g.el", "--roots", "0,8", "--d", "1", "--td", "g.td"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(v["width"], 3);
}

#[test]
fn reduce_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    run(&["gen", "grid", "--n", "3", "--m", "3", "-o", "g.el"], dir.path());
    let (code, v) = run(
        &["reduce", "--graph", "g.el", "--red", "0,2,6,8", "--k", "2", "--d", "1", "--threshold", "1", "-o", "r.el"],
        dir.path(),
    );
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["trace"]["status"], "threshold-met");
    assert!(dir.path().join("r.el").exists());
}

#[test]
fn routing_on_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = run(&["route", "--t", "4", "--paths", "2", "--surface", "cylinder"], dir.path());
    assert_eq!(code, 0);
    assert!(v["results"].as_array().unwrap().iter().all(|r| r["valid"] == Value::Bool(true)));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = run(&["gen", "grid", "--n", "3"], dir.path());
    assert_eq!(code, 2);
    std::fs::write(dir.path().join("bad.el"), "3 1\n0 7\n").unwrap();
    let (code, v) = run(&["tw", "--graph", "bad.el"], dir.path());
    assert_eq!(code, 2);
    assert!(v["error"].is_string());
    let (code, _) = run(&["no-such-command"], dir.path());
    assert_eq!(code, 2);
}

#[test]
fn hk_deletion_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v) = run(&["verify-hk", "--k", "2"], dir.path());
    assert_eq!(code, 0, "{v}");
}
