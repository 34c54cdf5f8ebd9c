//! Steps through a program with breakpoints, printing the call tree and the
//! partial circuit at each pause.

use qdbg_core::trace::{frame_detail, DebugSession};
use qdbg_core::{frontend, render};

const SRC: &str = "\
fn entangle(a, b) {
    h(a);
    cnot(a, b);
}
qnode pair(theta) on device(wires=3) {
    entangle(0, 1);
    for i in 0..2 {
        rx(theta * (i + 1), 2);
    }
    return expval(Z(0) @ Z(1));
}
pair(0.4);
";

fn main() {
    let (ast, _) = frontend::compile(SRC).expect("valid program");
    // line 8 sits inside the loop, so it pauses twice
    let mut session = DebugSession::start(&ast, [3, 8, 10], 1).unwrap();
    while let Ok(snap) = session.next() {
        match snap.paused_line() {
            Some(line) => println!("-- paused before line {line}, {} events so far", snap.events.len()),
            None => println!("-- finished with {} events", snap.events.len()),
        }
        print!("{}", snap.tree_text());
        println!("{}", render::build_view(&snap, 0).unwrap().to_text());
    }

    let last = session.latest().unwrap();
    let detail = frame_detail(last, 0).unwrap();
    println!("pair args {:?} -> {:?}", detail.args, detail.output);
}
