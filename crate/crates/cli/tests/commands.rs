use std::process::{Command, Output};

use serde_json::Value;

fn pvi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pvi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(stdout(out).trim()).expect("one json value")
}

#[test]
fn unknown_suite_is_a_usage_error() {
    assert_eq!(pvi(&["verify", "unknown-suite"]).status.code(), Some(2));
}

#[test]
fn malformed_rational_is_a_usage_error() {
    assert_eq!(pvi(&["apply", "s0", "--q", "1/0", "--p", "1", "--t", "3"]).status.code(), Some(2));
    assert_eq!(pvi(&["apply", "s0", "--q", "x", "--p", "1", "--t", "3"]).status.code(), Some(2));
}

#[test]
fn s0_at_a_point_adds_alpha0_to_p() {
    // alpha0 = 1 - 1/5 - 2/10 - 1/8 - 1/40 = 9/20
    let out = pvi(&["apply", "s0", "--q", "2", "--p", "1", "--t", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["p"], "29/20");
    assert_eq!(v["q"], "2");
    assert_eq!(v["t"], "3");
    assert_eq!(v["alpha"][0], "-9/20");
}

#[test]
fn s0_with_explicit_parameters() {
    // alpha0 = 1 - 1/2 + 2/3 - 1/5 = 29/30
    let out = pvi(&["apply", "s0", "--alpha", "1/2", "-1/3", "1/5", "0", "--q", "2", "--p", "1", "--t", "3"]);
    assert_eq!(json(&out)["p"], "59/30");
}

#[test]
fn empty_word_is_the_identity() {
    let v = json(&pvi(&["apply", ""]));
    assert_eq!(v["q"], "q");
    assert_eq!(v["p"], "p");
    assert_eq!(v["t"], "t");
    assert_eq!(v["shifts"], serde_json::json!(["0", "0", "0", "0", "0"]));
}

#[test]
fn first_translation_word_shifts_the_roots() {
    let out = pvi(&["apply", "r1 s1 s2 s3 s4 s2 s1", "--q", "2", "--p", "1", "--t", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["shifts"], serde_json::json!(["1", "-1", "0", "0", "0"]));
}

#[test]
fn orbit_raises_alpha0_by_one_per_step() {
    let out = pvi(&["orbit", "--word", "T1", "--steps", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let a0: Vec<String> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["alpha"][0].as_str().unwrap().to_string())
        .collect();
    assert_eq!(a0, ["9/20", "29/20", "49/20", "69/20"]);
}

#[test]
fn bt_check_on_s2_passes() {
    let out = pvi(&["bt-check", "--gen", "s2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["endpoint_error"].as_f64().unwrap() < 1e-6);
}

#[test]
fn symbolic_m_prints_the_lax_matrix() {
    let out = pvi(&["matrices", "--which", "M", "--symbolic"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json(&out);
    assert_eq!(rows.as_array().unwrap().len(), 8);
    assert_eq!(rows[1][2], "-p");
    assert_eq!(rows[2][3], "q - 1");
    assert_eq!(rows[0][1], "1");
}

#[test]
fn verify_passes_and_fails_under_mutation() {
    let out = pvi(&["verify", "zero-curvature"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines() {
        let v: Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["suite"], "zero-curvature");
    }
    assert_eq!(pvi(&["verify", "gauge-s", "--mutate", "7"]).status.code(), Some(1));
}

#[test]
fn integrate_writes_csv() {
    let dir = std::env::temp_dir().join(format!("pvi-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("traj.csv");
    let out = pvi(&["integrate", "--t-end", "5/2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("t_re,t_im,q_re,q_im,p_re,p_im,err\n"));
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("2.5e0,"));
    std::fs::remove_dir_all(dir).unwrap();
}
