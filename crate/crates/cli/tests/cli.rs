use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn mia(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mia")).args(args).output().unwrap()
}

fn code(args: &[&str]) -> i32 {
    mia(args).status.code().unwrap()
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = mia(&full);
    let v = serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    (out.status.code().unwrap(), v)
}

#[test]
fn every_fixture_but_the_broken_one_validates() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let expect = if name == "broken.mia" { 3 } else { 0 };
        assert_eq!(code(&["check", path.to_str().unwrap()]), expect, "{name}");
    }
}

#[test]
fn invalid_model_reports_rule_and_line() {
    let (c, v) = json(&["check", &fixture("broken.mia")]);
    assert_eq!(c, 3);
    assert_eq!(v["status"], "invalid");
    let first = &v["details"]["violations"][0];
    assert_eq!(first["rule"], "inputs-mandatory");
    assert_eq!(first["line"], 9);
}

#[test]
fn parse_errors_exit_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mia");
    std::fs::write(&path, "mia x\ninputs a\nfoo bar\n").unwrap();
    let out = mia(&["check", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    assert_eq!(code(&["check", &fixture("does-not-exist.mia")]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
}

#[test]
fn alphabet_mismatch_is_a_usage_error() {
    assert_eq!(code(&["mior", &fixture("fig4_i.mia"), &fixture("fig3a.mia")]), 2);
}

#[test]
fn mioco_reports_the_must_witness() {
    let (c, v) = json(&["mioco", &fixture("fig3c_ac.mia"), &fixture("fig3a.mia")]);
    assert_eq!(c, 1);
    assert_eq!(v["format"], "report-v1");
    assert_eq!(v["holds"], false);
    assert_eq!(v["clause"], "must");
    assert_eq!(v["witness_trace"], "1euro tea");
    assert_eq!(v["missing_or_extra_symbol"]["kind"], "missing");
    assert_eq!(v["missing_or_extra_symbol"]["symbol"], "cup");

    let (c, v) = json(&["mioco", &fixture("fig3b_ac.mia"), &fixture("fig3a.mia")]);
    assert_eq!(c, 0);
    assert_eq!(v["holds"], true);
    assert!(v["witness_trace"].is_null());
}

#[test]
fn mioco_needs_an_input_enabled_implementation() {
    let args = [fixture("fig3c.mia"), fixture("fig3a.mia")];
    assert_eq!(code(&["mioco", &args[0], &args[1]]), 3);
    let (c, v) = json(&["mioco", "--complete-impl", "angelic", &args[0], &args[1]]);
    assert_eq!(c, 1);
    assert_eq!(v["clause"], "must");
    assert_eq!(v["warnings"].as_array().unwrap().len(), 1);
}

#[test]
fn empty_witness_trace_on_fig4() {
    let (c, v) = json(&["mioco", &fixture("fig4_i.mia"), &fixture("fig4_s.mia")]);
    assert_eq!(c, 1);
    assert_eq!(v["witness_trace"], "");
    assert_eq!(v["missing_or_extra_symbol"]["symbol"], "b");
    let (c, v) = json(&["verify", "completeness1", &fixture("fig4_i.mia"), &fixture("fig4_s.mia")]);
    assert_eq!(c, 0);
    assert_eq!(v["status"], "skipped");
}

#[test]
fn refinement_and_variants() {
    assert_eq!(code(&["refine", &fixture("fig3b.mia"), &fixture("fig3a.mia")]), 0);
    assert_eq!(code(&["refine", &fixture("fig3a.mia"), &fixture("fig3b.mia")]), 1);
    let (c, v) = json(&["variants", "--list", &fixture("fig3a.mia")]);
    assert_eq!(c, 0);
    let masks: Vec<&str> = v["details"]["variants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["mask"].as_str().unwrap())
        .collect();
    assert_eq!(masks, ["000", "001", "010", "011", "100", "101", "110", "111"]);
}

#[test]
fn soundness_violation_exits_four() {
    let (c, v) = json(&["verify", "soundness", &fixture("fig3b_ac.mia"), &fixture("fig3a.mia")]);
    assert_eq!(c, 4);
    assert_eq!(v["status"], "THEOREM VIOLATION");
    assert_eq!(v["missing_or_extra_symbol"]["symbol"], "delta");
}

#[test]
fn completion_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    for (strategy, expected) in [("angelic", "fig5b.mia"), ("chaotic", "fig5c.mia")] {
        let path = dir.path().join(format!("{strategy}.mia"));
        let p = path.to_str().unwrap();
        assert_eq!(code(&["complete", "--strategy", strategy, &fixture("fig5a.mia"), "-o", p]), 0);
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# generated by: mia complete"));
        let (c, v) = json(&["check", p]);
        assert_eq!(c, 0);
        assert_eq!(v["details"]["input_enabled"], true);
        // the angelic result refines its fixture in both directions
        if strategy == "angelic" {
            assert_eq!(code(&["refine", p, &fixture(expected)]), 0);
            assert_eq!(code(&["refine", &fixture(expected), p]), 0);
        }
    }
}

#[test]
fn model_on_stdout_report_on_stderr() {
    let out = mia(&["--json", "famlts", &fixture("fig4_s.mia")]);
    assert_eq!(out.status.code(), Some(0));
    let model = String::from_utf8(out.stdout).unwrap();
    assert!(model.lines().any(|l| l.starts_with("iolts ")));
    let report: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(report["format"], "report-v1");
}

#[test]
fn generation_is_reproducible() {
    let args = ["gen", "--seed", "42", "--states", "5", "--input-enabled"];
    let a = mia(&args);
    let b = mia(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_is_byte_identical_across_runs() {
    let cases: [Vec<String>; 4] = [
        vec!["ioco".into(), fixture("fig2a.iolts"), fixture("fig2b.iolts")],
        vec!["mior".into(), fixture("fig3c.mia"), fixture("fig3a.mia")],
        vec!["variants".into(), "--list".into(), fixture("fig3a.mia")],
        vec!["verify".into(), "completeness2".into(), fixture("fig3c_ac.mia"), fixture("fig3a.mia")],
    ];
    for case in cases {
        let mut args = vec!["--json"];
        args.extend(case.iter().map(String::as_str));
        let a = mia(&args);
        let b = mia(&args);
        assert_eq!(a.stdout, b.stdout, "{case:?}");
        assert!(!String::from_utf8_lossy(&a.stdout).contains("wall_time_ms"));
    }
    let (_, v) = json(&["--timings", "ioco", &fixture("fig2a.iolts"), &fixture("fig2c.iolts")]);
    assert!(v["stats"]["wall_time_ms"].is_u64());
}

#[test]
fn pruned_listing_drops_unreachable_states() {
    let (c, v) = json(&["variants", "--list", "--prune", &fixture("fig4_i.mia")]);
    assert_eq!(c, 0);
    let listed = v["details"]["variants"].as_array().unwrap();
    assert_eq!(listed[0]["reachable_states"], serde_json::json!(["q0", "q1"]));
    assert_eq!(listed[1]["reachable_states"], serde_json::json!(["q0", "q1", "q2"]));
    assert_eq!(code(&["variants", "--prune", &fixture("fig4_i.mia")]), 2);
}
