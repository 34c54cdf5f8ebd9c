//! Applies the rewrite passes to a gate sequence directly, then shows the
//! same passes running as qnode decorators.

use qdbg_core::sim::ops::{cnot, h, rx, rz, x};
use qdbg_core::transforms::{apply_chain, GateSequence, TransformKind};
use qdbg_core::trace::{run_to_end, FrameKind};
use qdbg_core::{frontend, render};

fn main() {
    let seq = GateSequence::new(2, vec![h(0), x(1), x(1), h(0), rz(0.3, 1), cnot(0, 1), rx(1.0, 0), rx(-0.25, 0)]);
    let chain = [TransformKind::CancelInverses, TransformKind::MergeRotations];
    println!("input: {} ops", seq.len());
    for (kind, out) in apply_chain(&seq, &chain) {
        let names: Vec<String> = out
            .ops()
            .iter()
            .map(|op| format!("{}{:?}{:?}", op.name.name(), op.wires, op.params))
            .collect();
        println!("after {}: {}", kind.name(), names.join(" "));
    }

    let src = "\
@transform(cancel_inverses)
@transform(merge_rotations)
qnode m() on device(wires=1) {
    rz(0.5, 0);
    x(0);
    x(0);
    rz(0.25, 0);
    return state();
}
m();
";
    let (ast, _) = frontend::compile(src).unwrap();
    let snap = run_to_end(&ast, 0).unwrap();
    for f in snap.frames.iter().filter(|f| f.kind == FrameKind::TransformApplication) {
        println!("\n{} (frame {}):", f.name, f.id);
        print!("{}", render::transform_view(&snap, f.id).unwrap().to_text());
    }
}
