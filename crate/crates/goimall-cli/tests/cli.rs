use std::path::PathBuf;
use std::process::{Command, Output};

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn goimall(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goimall")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn pi1() -> String {
    sample("prologue_pi1.gm").display().to_string()
}

fn family() -> String {
    sample("prologue.json").display().to_string()
}

#[test]
fn verify_prologue() {
    let o = goimall(&["verify", &pi1(), "--family", &family()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("J: {1,2} -> {1}"), "{s}");
    assert!(s.trim_end().ends_with("PASS"));
}

#[test]
fn verify_json_and_jobs() {
    let o = goimall(&["--jobs", "1", "verify", &pi1(), "--family", &family(), "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["final_J"], serde_json::json!(["1"]));
}

#[test]
fn interp_cutlist_has_two_points() {
    let o = goimall(&["interp", &pi1(), "--mode", "cutlist", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let d = goimall(&["interp", &pi1(), "--mode", "denot"]);
    assert_eq!(stdout(&d).trim(), "[*, *]");
}

#[test]
fn normalize_trace_lines() {
    let o = goimall(&["normalize", &pi1(), "--family", &family(), "--trace"]);
    let s = stdout(&o);
    let lines: Vec<&str> = s.lines().collect();
    assert_eq!(lines[0], "step 1: WithPlus(1)@root  J: {1,2} -> {1}  dropped: {2}");
    assert_eq!(lines[1], "step 2: AxCut@root  J: {1} -> {1}  dropped: {}");
    assert_eq!(lines[2], "(ax bot)");
}

#[test]
fn exec_shows_symmetry_and_zero() {
    let o = goimall(&["exec", &pi1(), "--family", &family(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["2"], "ZERO");
    assert_eq!(v["1"], serde_json::json!([["(0,e)", "(1,e)"], ["(1,e)", "(0,e)"]]));
}

#[test]
fn translate_prints_indexed_conclusion() {
    let o = goimall(&["translate", &pi1(), "--family", &family()]);
    assert_eq!(stdout(&o).trim(), "|-{1,2} [ (1{1} & 1{2}, bot{1,2} + bot{}) ] bot{1,2}, 1{1,2}");
}

#[test]
fn axioms_pass() {
    let o = goimall(&["axioms", "--samples", "200", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("7/7 axiom families PASS"));
    let again = goimall(&["axioms", "--samples", "200", "--seed", "7"]);
    assert_eq!(o.stdout, again.stdout);
}

#[test]
fn corpus_mode() {
    let o = goimall(&["verify", "--enumerate", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("0 failing  PASS"));
}

#[test]
fn diagram_writes_dot() {
    let out = std::env::temp_dir().join(format!("goimall-{}.dot", std::process::id()));
    let o = goimall(&[
        "diagram",
        &sample("exzio.gm").display().to_string(),
        "--index",
        "2",
        "-o",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let dot = std::fs::read_to_string(&out).unwrap();
    assert!(dot.starts_with("digraph"));
    std::fs::remove_file(out).ok();
}

#[test]
fn exit_codes() {
    let dir = std::env::temp_dir();
    let bad_syntax = dir.join(format!("goimall-bad-{}.gm", std::process::id()));
    std::fs::write(&bad_syntax, "(cut (ax 1)").unwrap();
    assert_eq!(goimall(&["check", &bad_syntax.display().to_string()]).status.code(), Some(2));
    let ill_typed = dir.join(format!("goimall-ill-{}.gm", std::process::id()));
    std::fs::write(&ill_typed, "(cut (ax 1) (ax 1))").unwrap();
    assert_eq!(goimall(&["check", &ill_typed.display().to_string()]).status.code(), Some(1));
    assert_eq!(goimall(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(goimall(&["verify"]).status.code(), Some(2));
    assert_eq!(goimall(&["check", &pi1()]).status.code(), Some(0));
    std::fs::remove_file(bad_syntax).ok();
    std::fs::remove_file(ill_typed).ok();
}
