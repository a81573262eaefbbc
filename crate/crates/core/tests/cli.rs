use std::path::Path;
use std::process::{Command, Output};

fn relpol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relpol"))
        .args(args)
        .output()
        .expect("relpol runs")
}

fn code(args: &[&str]) -> i32 {
    relpol(args).status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_version_succeed() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["--version"]), 0);
    assert_eq!(code(&[]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn domains_listing() {
    let out = relpol(&["domains"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["bw1", "bw2", "pw1", "pw2", "lw1", "lw2", "bwdet"] {
        assert!(text.contains(name), "{name}");
    }
    let bw1 = relpol(&["domains", "bw1"]);
    let shipped = std::fs::read(Path::new(env!("CARGO_MANIFEST_DIR")).join("domains/bw1.dom")).unwrap();
    assert_eq!(bw1.stdout, shipped);
    assert_eq!(code(&["domains", "nope"]), 3);
}

#[test]
fn usage_and_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let gen = |size: &str, dom: &str| {
        code(&[
            "gen-data", "--domain", dom, "--size", size, "--trajectories", "2", "--horizon", "6", "--seed", "1", "-o",
            s(&out),
        ])
    };
    assert_eq!(gen("x", "bw1"), 2);
    assert_eq!(gen("2,2,2,2", "bw1"), 2);
    assert_eq!(gen("3", "nope"), 3);
    assert_eq!(code(&["--jobs", "0", "domains"]), 2);

    let bad_dom = dir.path().join("bad.dom");
    std::fs::write(&bad_dom, "(domain d (predicates (p 1)) (action").unwrap();
    assert_eq!(code(&["inspect", "domain", s(&bad_dom)]), 3);
    assert_eq!(code(&["inspect", "domain", s(&dir.path().join("missing"))]), 1);

    let pol = dir.path().join("p.policy");
    std::fs::write(&pol, "(policy (rule nonsense pick-up))").unwrap();
    assert_eq!(code(&["inspect", "policy", "--domain", "bw1", s(&pol)]), 6);
    assert_eq!(
        code(&["eval", "--domain", "bw1", "--policy", s(&pol), "--size", "3", "--episodes", "5", "--horizon", "5", "--seed", "0"]),
        6
    );

    let empty = dir.path().join("empty.jsonl");
    std::fs::write(&empty, "").unwrap();
    let learn = |train: &Path, depth: &str| {
        code(&[
            "learn", "--domain", "bw1", "--train", s(train), "--depth", depth, "--width", "2", "--beam", "2", "-o",
            s(&dir.path().join("o.policy")),
        ])
    };
    assert_eq!(learn(&empty, "2"), 5);
    let garbage = dir.path().join("garbage.jsonl");
    std::fs::write(&garbage, "{not json}\n").unwrap();
    assert_eq!(learn(&garbage, "2"), 1);

    let cfg = dir.path().join("x.cfg");
    std::fs::write(&cfg, "domain = bw1\ncolour = red\n").unwrap();
    assert_eq!(code(&["experiment", s(&cfg)]), 2);
}

#[test]
fn budget_exhaustion_has_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.jsonl");
    let c = code(&[
        "gen-data", "--domain", "bw1", "--size", "6", "--trajectories", "1", "--horizon", "20", "--seed", "1",
        "--node-budget", "10", "-o", s(&out),
    ]);
    assert_eq!(c, 4);
}

#[test]
fn pipeline_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("t.jsonl");
    let pol = dir.path().join("p.policy");
    assert_eq!(
        code(&["gen-data", "--domain", "bw1", "--size", "3", "--trajectories", "8", "--horizon", "10", "--seed", "2", "-o", s(&train)]),
        0
    );
    let meta: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("t.jsonl.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["trajectories"], 8);
    assert_eq!(
        code(&["learn", "--domain", "bw1", "--train", s(&train), "--depth", "2", "--width", "4", "--beam", "3", "-o", s(&pol)]),
        0
    );
    let shown = relpol(&["inspect", "policy", "--domain", "bw1", s(&pol)]);
    assert!(shown.status.success());
    assert_eq!(shown.stdout, std::fs::read(&pol).unwrap());
    let eval = relpol(&["eval", "--domain", "bw1", "--policy", s(&pol), "--size", "3", "--episodes", "20", "--horizon", "30", "--seed", "4"]);
    assert!(eval.status.success());
    let r: serde_json::Value = serde_json::from_slice(&eval.stdout).unwrap();
    let phi = r["phi"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&phi));
}
