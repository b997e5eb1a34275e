use std::path::Path;
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_uai-lab"))
}

#[test]
fn list_names_every_scenario() {
    let out = lab().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for s in uai_lab::SCENARIOS {
        assert!(text.lines().any(|l| l.starts_with(s)), "{s} missing");
    }
}

#[test]
fn unknown_scenario_exits_two_and_lists_available() {
    let out = lab().args(["run", "thm99"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("thm99") && err.contains("thm8_gap"), "{err}");
}

#[test]
fn check_accepts_shipped_configs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    for s in uai_lab::SCENARIOS {
        let out = lab().arg("check").arg(dir.join(format!("{s}.json"))).output().unwrap();
        assert!(out.status.success(), "{s}");
    }
}

#[test]
fn bad_configs_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        ("not_json.json", "{"),
        ("old_version.json", r#"{"version": 0, "scenario": "thm8_gap"}"#),
        ("missing_field.json", r#"{"version": 1, "scenario": "thm10_normalized"}"#),
        ("extra_field.json", r#"{"version": 1, "scenario": "thm10_normalized", "cases": [], "bogus": 1}"#),
    ];
    for (name, text) in cases {
        let path = tmp.path().join(name);
        std::fs::write(&path, text).unwrap();
        let out = lab().arg("check").arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
        let out = lab().args(["run", "thm10_normalized", "--config"]).arg(&path).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{name}");
    }
}

#[test]
fn config_for_another_scenario_is_rejected() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/thm8_gap.json");
    let out = lab().args(["run", "thm7_drop", "--config"]).arg(path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_csvs_and_summary() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lab()
        .args(["run", "thm8_gap", "--jobs", "2", "--seed", "3", "--out"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let summary = std::fs::read_to_string(tmp.path().join("summary.txt")).unwrap();
    let first = summary.lines().next().unwrap();
    assert!(first.starts_with("# generated at unix time") && first.contains("jobs 2") && first.contains("seed 3"));
    assert!(summary.contains("domination_gap"));
    assert!(summary.contains("violations: none"));
    let trace = std::fs::read_to_string(tmp.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,action,conditional,cumulative_product_exact_as_fraction,cumulative_product_float\n"));
    assert_eq!(trace.lines().count(), 31);
    assert!(trace.lines().nth(1).unwrap().starts_with("1,1,17/24,17/24,"));
}

#[test]
fn invariant_violation_exits_one() {
    // a copy mixture stays far above a tiny threshold, so the expected drop is missing
    let tmp = tempfile::tempdir().unwrap();
    let cfg = r#"{"version": 1, "scenario": "thm8_gap",
      "joint": {"name": "copy", "component": {"builtin": {"name": "copy"}}},
      "chron": {"name": "id", "component": {"mixture": {"components": [
        {"weight": "1", "component": {"builtin": {"name": "mu_id"}}}]}}},
      "steps": 5, "threshold": "1/1000", "check_steps": 3}"#;
    let path = tmp.path().join("cfg.json");
    std::fs::write(&path, cfg).unwrap();
    let out = lab().args(["run", "thm8_gap", "--config"]).arg(&path).arg("--out").arg(tmp.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
