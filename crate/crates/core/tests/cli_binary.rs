use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cantor-cli-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(dir: &Path, cfg: &str, extra: &[&str]) -> Output {
    let path = dir.join("run.ini");
    std::fs::write(&path, cfg).unwrap();
    Command::new(env!("CARGO_BIN_EXE_cantor-actions"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir)
        .args(extra)
        .output()
        .unwrap()
}

const GRIG_LQA: &str = "[model]\nbuilder = grigorchuk\ndepth = 4\n[command]\nname = lqa\n[bounds]\nL = 1\nD = 2\n[output]\nreport = report.txt\n";

#[test]
fn witness_is_written_and_replays() {
    let dir = scratch("lqa");
    let out = run(&dir, GRIG_LQA, &[]);
    assert_eq!(out.status.code(), Some(1));
    let witness = dir.join("lqa-witness.tsv");
    let text = std::fs::read_to_string(&witness).unwrap();
    assert!(text.contains("claim\twitness"));
    let report = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    assert_eq!(report.as_bytes(), out.stdout.as_slice());

    let replay = run(&dir, GRIG_LQA, &["--verify", witness.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0), "{}", String::from_utf8_lossy(&replay.stdout));
}

#[test]
fn tampered_witness_is_rejected() {
    let dir = scratch("tamper");
    run(&dir, GRIG_LQA, &[]);
    let witness = dir.join("lqa-witness.tsv");
    let text = std::fs::read_to_string(&witness).unwrap();
    let tampered: String = text
        .lines()
        .map(|l| if l.starts_with("word\t") { "word\tb*c*d" } else { l })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&witness, tampered).unwrap();
    let replay = run(&dir, GRIG_LQA, &["--verify", witness.to_str().unwrap()]);
    assert_ne!(replay.status.code(), Some(0));
}

#[test]
fn free_action_passes_quietly() {
    let dir = scratch("free");
    let cfg = "[model]\nbuilder = odometer\narities = 2,2,2\n[command]\nname = freeness\n[bounds]\nL = 4\n";
    let out = run(&dir, cfg, &["--quiet"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn unmatched_return_equivalence_is_inconclusive() {
    let dir = scratch("swap");
    let cfg = "[model]\nbuilder = odometer\narities = 2,2\n[command]\nname = return-equiv\nh = 0>1,1>0,2>2,3>3\n[bounds]\nD = 2\n";
    let out = run(&dir, cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("t"));
}

#[test]
fn malformed_config_is_an_input_error() {
    let dir = scratch("bad");
    let out = run(&dir, "[model]\nbuilder = nonsense\n[command]\nname = freeness\n", &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
    let missing = Command::new(env!("CARGO_BIN_EXE_cantor-actions"))
        .args(["--config", "/nonexistent/cfg.ini"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn dot_export_is_written() {
    let dir = scratch("dot");
    let cfg = "[model]\nbuilder = odometer\narities = 2,2\n[command]\nname = export-dot\ndepth = 2\n";
    let out = run(&dir, cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let dot = std::fs::read_to_string(dir.join("tree.dot")).unwrap();
    assert!(dot.starts_with("digraph tree {"));
    assert_eq!(dot.matches("->").count(), 6);
}
