//! Prints the JSON a client receives for a snapshot and a frame's circuit.

use qdbg_core::trace::DebugSession;
use qdbg_core::{frontend, render, GROVER_QDL};

fn main() {
    let (ast, _) = frontend::compile(GROVER_QDL).unwrap();
    let mut session = DebugSession::start(&ast, [28], 0).unwrap();
    let paused = session.next().unwrap();
    let view = render::build_view(&paused, 0).unwrap();
    println!("{}", serde_json::to_string_pretty(&view).unwrap());

    let done = session.next().unwrap();
    let json = serde_json::to_value(&done).unwrap();
    println!("status {}, {} frames, {} events", json["status"], json["frames"].as_array().unwrap().len(), json["events"].as_array().unwrap().len());
    println!("{}", serde_json::to_string(&json["frames"][1]).unwrap());
}
