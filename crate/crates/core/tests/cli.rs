use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn lsgame(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_lsgame")).args(args).output().expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    assert_eq!(report["schema"], 1);
    (out.status.code().unwrap(), report)
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classical_and_npa_on_the_magic_square() {
    let sys = data("magic_square.sys");
    let (code, r) = lsgame(&["classical", path(&sys)]);
    assert_eq!(code, 0);
    assert_eq!(r["classical"]["value"], "17/18");
    let (code, r) = lsgame(&["npa", path(&sys), "--level", "1"]);
    assert_eq!(code, 0);
    assert!((r["npa"]["value"].as_f64().unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn analyze_inconsistent_pair() {
    let (code, r) = lsgame(&["analyze", path(&data("inconsistent_pair.sys"))]);
    assert_eq!(code, 0);
    assert_eq!(r["classical"]["value"], "1/2");
    assert!(r["npa"]["value"].as_f64().unwrap() <= 0.5 + 1e-5);
    assert_eq!(r["errors"].as_array().unwrap().len(), 0);
}

#[test]
fn analyze_collects_tool_errors() {
    // the pair has weight-1 rows, so sampling the wheel correlation is unsupported
    let (code, r) = lsgame(&["analyze", path(&data("inconsistent_pair.sys")), "--rounds", "10"]);
    assert_eq!(code, 3);
    assert_eq!(r["errors"][0]["tool"], "pzk_sample");
    assert_eq!(r["classical"]["value"], "1/2");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.sys");
    std::fs::write(&bad, "1 2\n2 1 | 0\n").unwrap();
    let (code, r) = lsgame(&["classical", path(&bad)]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["kind"], "malformed");
    let (code, _) = lsgame(&["pzk-sample", path(&data("magic_square.sys")), "--rounds", "0"]);
    assert_eq!(code, 3);
    let (code, _) = lsgame(&["rep-search", path(&data("z2_inv.pres")), "--dim-cap", "3"]);
    assert_eq!(code, 3);
}

#[test]
fn compile_output_feeds_the_game_tools() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("z2.sys");
    let (code, r) = lsgame(&["compile", path(&data("z2_inv.pres")), "--out", path(&sys)]);
    assert_eq!(code, 0);
    assert_eq!(r["size_bound"]["holds"], true);
    let (code, g) = lsgame(&["game", path(&sys)]);
    assert_eq!(code, 0);
    assert_eq!(g["game"]["max_alice_outputs"], 4);
    let (code, c) = lsgame(&["pzk-corr", path(&sys)]);
    assert_eq!(code, 0);
    assert_eq!(c["game_value"], "1");
}

#[test]
fn pipeline_transports_a_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let (code, r) = lsgame(&[
        "pipeline",
        path(&data("z2.pres")),
        "a a",
        "--cert",
        path(&data("z2_square.cert")),
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code, 0);
    let t = &r["transport"];
    assert_eq!(t["hnn_area"], 5);
    assert_eq!(t["valid"], true);
    assert!(t["solution_group_area"].as_u64() <= t["coarse_bound"].as_u64());
    for v in r["checks"].as_object().unwrap().values() {
        assert_eq!(v, &Value::Bool(true));
    }

    // the written certificate replays against the written solution group
    let (code, check) = lsgame(&[
        "verify-cert",
        path(&dir.path().join("solution_group.txt")),
        path(&dir.path().join("certificate.txt")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(check["check"]["valid"], true);
}

#[test]
fn pipeline_with_trivial_word_is_flagged() {
    let (code, r) = lsgame(&["pipeline", path(&data("z2.pres")), "1"]);
    assert_eq!(code, 0);
    assert!(r["notes"][0].as_str().unwrap().contains("value < 1 expected"));
    assert_eq!(r["stages"]["game"]["max_alice_outputs"], 4);
}

#[test]
fn seeded_reports_repeat() {
    let sys = data("magic_square.sys");
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_lsgame"))
            .args(["protocol", path(&sys), "--rounds", "300", "--seed", "9"])
            .output()
            .unwrap();
        out.stdout
    };
    assert_eq!(run(), run());
}
