//! Uses the registry directly, without a network, including the headless
//! runner behind `qdbg run`.

use qdbg_server::cli::{run_source, RunOptions};
use qdbg_server::{Registry, ServerEvent};
use serde_json::json;

fn main() {
    let reg = Registry::new();
    let src = "qnode bell() on device(wires=2) {\n    h(0);\n    cnot(0, 1);\n    return expval(Z(0) @ Z(1));\n}\nbell();\n";
    let ServerEvent::Loaded { token, .. } = reg.handle_text(&json!({"op": "load", "source": src}).to_string()) else {
        panic!("program should load");
    };
    for msg in [
        json!({"op": "breakpoints", "token": token, "lines": [3]}),
        json!({"op": "start", "token": token, "seed": 9}),
        json!({"op": "next", "token": token}),
        json!({"op": "zoom", "token": token, "frame": 0}),
        json!({"op": "next", "token": token}),
        json!({"op": "next", "token": token}),
    ] {
        let reply = reg.handle_text(&msg.to_string()).to_json();
        println!("{} -> {}", msg["op"], &reply[..reply.len().min(120)]);
    }
    for junk in ["", "{", "[1,2]", r#"{"op":"fly"}"#] {
        println!("{junk:?} -> {}", reg.handle_text(junk).to_json());
    }

    let out = run_source(src, &RunOptions { breakpoints: vec![3], json: false, ..Default::default() });
    println!("qdbg run exit {}:\n{}", out.code, out.stdout);
}
