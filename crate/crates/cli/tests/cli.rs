use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn knotgate(args: &[&str], stdin: Option<&[u8]>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_knotgate"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or_default()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = knotgate(&full, None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn present_reduced_trefoil_has_two_generators() {
    let v = json(&["present", "--knot", "trefoil", "--reduce"]);
    assert_eq!(v["command"], "present");
    let p = &v["result"]["presentation"];
    assert_eq!(p["generators"].as_array().unwrap().len(), 2);
    assert_eq!(p["relators"].as_array().unwrap().len(), 1);
    assert_eq!(v["result"]["crossings"], 3);
}

#[test]
fn modular_image_of_aba_is_s() {
    let v = json(&["modular", "--word", "aba"]);
    assert_eq!(v["result"]["matrix"], serde_json::json!([[0, 1], [-1, 0]]));
    let text = knotgate(&["modular", "--word", "aba"], None);
    assert_eq!(String::from_utf8_lossy(&text.stdout).trim(), "[[0, 1], [-1, 0]]");
}

#[test]
fn fibonacci_check_succeeds() {
    let out = knotgate(&["rep", "--type", "fibonacci", "--check"], None);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&["rep", "--type", "fibonacci"]);
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-10);
}

#[test]
fn present_output_pipes_into_solver() {
    let present = knotgate(&["--json", "present", "--knot", "trefoil", "--reduce"], None);
    assert!(present.status.success());
    let solved = knotgate(&["--json", "rep", "--solve", "--restarts", "8", "--nonabelian"], Some(&present.stdout));
    assert_eq!(solved.status.code(), Some(0), "{}", String::from_utf8_lossy(&solved.stderr));
    let v: Value = serde_json::from_slice(&solved.stdout).unwrap();
    assert!(v["result"]["residual"].as_f64().unwrap() < 1e-10);
    assert!(v["result"]["commutator_defect"].as_f64().unwrap() > 0.1);

    let verified = knotgate(&["--json", "rep", "--verify", "--check"], Some(&solved.stdout));
    assert_eq!(verified.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&verified.stdout).unwrap();
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn invalid_input_is_a_validation_error() {
    assert_eq!(knotgate(&["present", "--pd", "X(1,2"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["present", "--knot", "no-such-knot"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["modular", "--word", "aq"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["rep", "--type", "kl"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["rep", "--verify"], Some(b"{not json")).status.code(), Some(2));
    assert_eq!(knotgate(&["holonomy", "word", "--word", "ac"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["frobnicate"], None).status.code(), Some(2));
    assert_eq!(knotgate(&["--help"], None).status.code(), Some(0));
}

#[test]
fn unsolvable_presentation_is_a_numeric_failure() {
    // a^2 = a^3 = 1 forces the trivial representation
    let p = br#"{"presentation": {"generators": ["a"], "relators": ["aa", "aaa"]}}"#;
    let out = knotgate(&["rep", "--solve", "--nonabelian"], Some(p));
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn json_output_is_deterministic() {
    for args in [
        &["--json", "compile", "--target", "j", "--max-len", "8"][..],
        &["--json", "character", "--knot", "trefoil", "--steps", "3"][..],
        &["--json", "rep", "--solve", "--knot", "figure8", "--restarts", "3"][..],
    ] {
        let a = knotgate(args, None);
        let b = knotgate(args, None);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn linkgate_hopf_is_maximally_entangling_at_quarter_period() {
    let v = json(&["linkgate", "--link", "hopf", "--time", "pi/4"]);
    assert!((v["result"]["lambda_min"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    let v = json(&["linkgate", "--link", "hopf", "--scan", "--scan-steps", "32"]);
    let times: Vec<f64> = v["result"]["local_times"].as_array().unwrap().iter().map(|r| r["t"].as_f64().unwrap()).collect();
    assert!(times.iter().any(|t| (t - std::f64::consts::FRAC_PI_2).abs() < 1e-6), "{times:?}");
}

#[test]
fn holonomy_modes_run() {
    let v = json(&["holonomy", "loop", "--loop", "equator", "--refine", "2000", "--mode", "abelian"]);
    assert!((v["result"]["angle"].as_f64().unwrap().abs() - std::f64::consts::PI).abs() < 1e-4);
    let v = json(&["holonomy", "flatness", "--halvings", "2"]);
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 3);
    let v = json(&["holonomy", "word", "--word", "abAB"]);
    assert!(v["result"]["unitary"].is_array());
}

#[test]
fn catalog_lists_every_entry() {
    let v = json(&["catalog"]);
    assert_eq!(v["result"].as_array().unwrap().len(), 6);
}

#[test]
fn character_csv_has_header() {
    let out = knotgate(&["character", "--knot", "trefoil", "--steps", "3", "--csv"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,y,z,residual\n"));
    assert!(text.lines().count() > 1);
}

#[test]
fn axis_target_ignores_axis_scale() {
    let a = json(&["compile", "--target", "axis:0,0,1,pi/3", "--max-len", "6"]);
    let b = json(&["compile", "--target", "axis:0,0,5,pi/3", "--max-len", "6"]);
    assert_eq!(a["result"]["target"], b["result"]["target"]);
    assert_eq!(a["result"]["word"], b["result"]["word"]);
}
