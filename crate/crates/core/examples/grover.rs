//! Runs the bundled Grover search and prints the call tree, the root circuit
//! and the zoomed-in oracle circuit.

use qdbg_core::trace::{run_to_end, FrameKind, MeasurementResult};
use qdbg_core::{frontend, render, GROVER_QDL};

fn main() {
    let (ast, _) = frontend::compile(GROVER_QDL).expect("bundled program compiles");
    let snapshot = run_to_end(&ast, 0).expect("checked");

    print!("{}", snapshot.tree_text());

    if let Some(MeasurementResult::Probs { values, .. }) = snapshot.outputs[0].values.first() {
        println!("P(|101>) = {:.4}", values[0b101]);
    }

    let root = render::build_view(&snapshot, 0).unwrap();
    println!("\nroot circuit:\n{}", root.to_text());

    let oracle = snapshot
        .frames
        .iter()
        .find(|f| f.kind == FrameKind::Subroutine && f.name == "oracle")
        .unwrap();
    let zoom = render::build_view(&snapshot, oracle.id).unwrap();
    println!("oracle#1 circuit:\n{}", zoom.to_text());
}
