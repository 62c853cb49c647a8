//! End-to-end checks of the command-line interface.

use assert_cmd::Command;
use predicates::prelude::*;

fn acgeom() -> Command {
    Command::cargo_bin("acgeom").unwrap()
}

fn scenario_path() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/ball-standard.json")
}

#[test]
fn validate_accepts_bundled_scenario() {
    acgeom()
        .args(["validate"])
        .arg(scenario_path())
        .assert()
        .success()
        .stdout(predicate::str::contains("ball-standard: ok"));
}

#[test]
fn validate_rejects_eta_out_of_range_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "name": "bad", "dimension": 2, "seed": 1,
            "structure": { "kind": "standard" },
            "domain": { "kind": "ball" },
            "tasks": [
                { "kind": "df_search", "name": "df", "fixed": { "A": 4.0, "eta": 1.5 } }
            ]
        }"#,
    )
    .unwrap();
    acgeom()
        .args(["validate"])
        .arg(&path)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("fixed.eta"))
        .stderr(predicate::str::contains("(0, 1)"));
}

#[test]
fn validate_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "name": "bad", "dimension": 2, "seed": 1, "typo_field": true,
            "structure": { "kind": "standard" },
            "domain": { "kind": "ball" },
            "tasks": [ { "kind": "disc", "name": "d",
                         "center": [[0,0],[0,0]], "direction": [[0.1,0],[0,0]] } ]
        }"#,
    )
    .unwrap();
    acgeom().args(["validate"]).arg(&path).assert().code(2);
}

#[test]
fn validate_rejects_bad_sup_norm() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{
            "name": "bad", "dimension": 2, "seed": 1,
            "structure": { "kind": "seeded", "seed": 3, "sup_norm": 1.2 },
            "domain": { "kind": "ball" },
            "tasks": [ { "kind": "disc", "name": "d",
                         "center": [[0,0],[0,0]], "direction": [[0.1,0],[0,0]] } ]
        }"#,
    )
    .unwrap();
    acgeom()
        .args(["validate"])
        .arg(&path)
        .assert()
        .code(2)
        .stderr(predicate::str::contains("structure.sup_norm"));
}

#[test]
fn run_is_deterministic_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.json");
    std::fs::write(
        &cfg,
        r#"{
            "name": "tiny", "dimension": 2, "seed": 9,
            "structure": { "kind": "seeded", "seed": 9, "sup_norm": 0.05 },
            "domain": { "kind": "ball" },
            "tasks": [
                { "kind": "disc", "name": "d",
                  "center": [[0.05,0],[0,0]], "direction": [[0.2,0],[0,0.1]] },
                { "kind": "df_search", "name": "df",
                  "n_collar_points": 20, "dirs_per_point": 2, "recheck": false }
            ]
        }"#,
    )
    .unwrap();
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    for out in [&out1, &out2] {
        acgeom()
            .args(["run"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--log-level", "off"])
            .assert()
            .success()
            .stdout(predicate::str::contains("d: pass"))
            .stdout(predicate::str::contains("df: pass"));
    }
    let a = std::fs::read(out1.join("tiny-report.json")).unwrap();
    let b = std::fs::read(out2.join("tiny-report.json")).unwrap();
    assert_eq!(a, b, "reports differ between identical runs");
}

#[test]
fn emit_plots_extracts_sections_and_flags_missing_ones() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.json");
    std::fs::write(
        &cfg,
        r#"{
            "name": "tiny", "dimension": 2, "seed": 9,
            "structure": { "kind": "standard" },
            "domain": { "kind": "ball" },
            "tasks": [
                { "kind": "df_search", "name": "df",
                  "n_collar_points": 20, "dirs_per_point": 2, "recheck": false }
            ]
        }"#,
    )
    .unwrap();
    acgeom()
        .args(["run"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .args(["--log-level", "off"])
        .assert()
        .success();
    let report = dir.path().join("tiny-report.json");
    acgeom()
        .args(["emit-plots"])
        .arg(&report)
        .args(["--section", "df-ladder"])
        .assert()
        .success()
        .stdout(predicate::str::starts_with("A,eta,min_D,certified"));
    acgeom()
        .args(["emit-plots"])
        .arg(&report)
        .args(["--section", "contact-ladder"])
        .assert()
        .code(1)
        .stderr(predicate::str::contains("contact-ladder"));
}

#[test]
fn run_exits_one_on_task_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("neg.json");
    // non-pseudoconvex domain without the expectation flag: the search
    // rejects it and the task fails
    std::fs::write(
        &cfg,
        r#"{
            "name": "neg", "dimension": 2, "seed": 2,
            "structure": { "kind": "standard" },
            "domain": { "kind": "hartogs_figure" },
            "tasks": [
                { "kind": "df_search", "name": "df",
                  "n_collar_points": 20, "dirs_per_point": 2, "recheck": false }
            ]
        }"#,
    )
    .unwrap();
    acgeom()
        .args(["run"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .args(["--log-level", "off"])
        .assert()
        .code(1)
        .stdout(predicate::str::contains("df: fail"));
}
