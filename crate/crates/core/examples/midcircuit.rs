//! Mid-circuit measurement: the recorded bits depend only on the seed.

use qdbg_core::frontend;
use qdbg_core::trace::{run_to_end, EventPayload};

const SRC: &str = "\
qnode flips() on device(wires=2) {
    h(0);
    let a = measure(0);
    if a == 1 {
        x(1);
    }
    h(0);
    let b = measure(0);
    return probs(1);
}
flips();
";

fn main() {
    let (ast, _) = frontend::compile(SRC).unwrap();
    for seed in 0..8 {
        let snap = run_to_end(&ast, seed).unwrap();
        let bits: Vec<u8> = snap
            .events
            .iter()
            .filter_map(|e| match e.payload {
                EventPayload::Midmeasure { bit, .. } => Some(bit),
                _ => None,
            })
            .collect();
        let again = serde_json::to_string(&run_to_end(&ast, seed).unwrap()).unwrap();
        assert_eq!(again, serde_json::to_string(&snap).unwrap());
        println!("seed {seed}: bits {bits:?}, output {:?}", snap.outputs[0].values);
    }
}
