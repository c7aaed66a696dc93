//! End-to-end runs of the binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpquiver"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn plane_quiver_as_dot() {
    let o = run(&["quiver", "--table1", "9"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.starts_with("digraph"));
    assert_eq!(s.lines().filter(|l| l.contains(" -> v")).count(), 6);
    assert_eq!(s.lines().filter(|l| l.starts_with("// relation")).count(), 3);
}

#[test]
fn quiver_as_json_lists_relations() {
    let o = run(&["quiver", "--table1", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["dot"].as_str().unwrap().contains("style=dashed"));
    assert!(!v["relations"].as_array().unwrap().is_empty());
}

#[test]
fn fiber_on_degree_eight_with_auto_weight() {
    let o = run(&["fiber", "--table1", "8", "--weight", "auto"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let summary = v["summary"].as_str().unwrap();
    assert!(summary.starts_with("2 free parameters"), "{summary}");
    assert!(summary.ends_with("unstable locus = origin"), "{summary}");
}

#[test]
fn validate_degree_three() {
    let o = run(&["validate", "--table1", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["toric"]["pass"], true);
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    for cmd in ["fiber", "blowdown"] {
        let a = run(&[cmd, "--table1", "7", "--seed", "5"]);
        let b = run(&[cmd, "--table1", "7", "--seed", "5"]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn stability_of_plane_and_exceptional_points() {
    let o = run(&["stability", "--table1", "8", "--point", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["verdict"], "stable");
    let o = run(&["stability", "--table1", "8", "--exceptional", "1,-2/3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["report"]["verdict"], "stable");
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(run(&["validate"]).status.code(), Some(2));
    assert_eq!(run(&["stability", "--table1", "8", "--point", "1,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["fiber", "--table1", "8", "--weight", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["validate", "--config", "/nonexistent.toml"]).status.code(), Some(2));
}

#[test]
fn failed_checks_exit_with_one() {
    let o = run(&["fiber", "--table1", "8", "--weight=-1,-1,1,1"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unstable_locus_is_origin"], false);
}

#[test]
fn config_file_drives_commands_and_output() {
    let dir = std::env::temp_dir().join(format!("dpquiver-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = dir.join("report.json");
    let cfg = dir.join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "collection = [\"0\", \"H-E1\", \"H\", \"2H-E1\"]\ncenters = [[0, 0, 1]]\nweight = \"auto\"\nseed = 9\ncommands = [\"fiber\"]\nout = {:?}\n",
            out.display().to_string()
        ),
    )
    .unwrap();
    let o = run(&["--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["free_parameters"], 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn suite_passes() {
    let o = run(&["suite"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(), 7);
}
