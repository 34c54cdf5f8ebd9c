use std::io::Write;
use std::process::Command;

use serde_json::Value;

fn qdbg(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qdbg")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn grover_path() -> String {
    concat!(env!("CARGO_MANIFEST_DIR"), "/../core/programs/grover.qdl").to_string()
}

fn temp_program(name: &str, src: &str) -> std::path::PathBuf {
    let path = std::env::temp_dir().join(format!("qdbg-cli-{}-{name}.qdl", std::process::id()));
    std::fs::File::create(&path).unwrap().write_all(src.as_bytes()).unwrap();
    path
}

fn docs(stdout: &str) -> Vec<Value> {
    stdout.lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn grover_without_breakpoints() {
    let (code, out, _) = qdbg(&["run", &grover_path(), "--json"]);
    assert_eq!(code, 0);
    let docs = docs(&out);
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0]["status"], "finished");
}

#[test]
fn grover_with_breakpoint_on_line_28() {
    let (code, out, _) = qdbg(&["run", &grover_path(), "--break", "28", "--json", "--seed", "4"]);
    assert_eq!(code, 0);
    let docs = docs(&out);
    assert_eq!(docs.len(), 2);
    assert_eq!(docs[0]["status"], "paused");
    assert_eq!(docs[0]["line"], 28);
    assert_eq!(docs[1]["status"], "finished");
}

#[test]
fn frame_view_is_appended() {
    let (code, out, _) = qdbg(&["run", &grover_path(), "--json", "--frame", "0"]);
    assert_eq!(code, 0);
    let docs = docs(&out);
    assert_eq!(docs.len(), 2);
    assert_eq!(docs[1]["wires"], 5);

    let (code, _, err) = qdbg(&["run", &grover_path(), "--frame", "999"]);
    assert_eq!(code, 2);
    assert!(err.contains("999"));
}

#[test]
fn semantic_error_exits_one_with_diagnostics() {
    let path = temp_program("semantic", "qnode m() on device(wires=1) {\n    hh(0);\n    return probs(0);\n}\nm();\n");
    let (code, out, _) = qdbg(&["run", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    let docs = docs(&out);
    assert_eq!(docs[0]["diagnostics"][0]["line"], 2);
    assert_eq!(docs[0]["diagnostics"][0]["phase"], "semantic");
}

#[test]
fn runtime_error_exits_one() {
    let path = temp_program("runtime", "qnode m() on device(wires=1) {\n    x(4);\n    return probs(0);\n}\nm();\n");
    let (code, out, _) = qdbg(&["run", path.to_str().unwrap(), "--json"]);
    assert_eq!(code, 1);
    assert_eq!(docs(&out)[0]["status"], "runtime_error");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(qdbg(&["run", "/definitely/not/here.qdl"]).0, 2);
    assert_eq!(qdbg(&["run", &grover_path(), "--break", "x"]).0, 2);
    assert_eq!(qdbg(&["run"]).0, 2);
    assert_eq!(qdbg(&["frobnicate"]).0, 2);
}

#[test]
fn text_mode_shows_tree_and_circuit() {
    let (code, out, _) = qdbg(&["run", &grover_path()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("finished"));
    assert!(out.contains("oracle"));
}
