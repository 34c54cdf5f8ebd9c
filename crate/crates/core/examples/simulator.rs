//! Uses the statevector simulator without the interpreter.

use qdbg_core::sim::ops::{cnot, h, ry};
use qdbg_core::sim::{Pauli, RngState, Statevector};

fn main() {
    let mut sv = Statevector::new(3).unwrap();
    for op in [h(0), cnot(0, 1), cnot(1, 2), ry(0.3, 2)] {
        sv.apply(&op).unwrap();
    }
    println!("norm = {:.12}", sv.norm());
    println!("probs(0,1,2) = {:?}", sv.probs(&[0, 1, 2]).unwrap());
    println!("<Z0 Z1> = {:.6}", sv.expval(&[(Pauli::Z, 0), (Pauli::Z, 1)]).unwrap());
    println!("<X2> = {:.6}", sv.expval(&[(Pauli::X, 2)]).unwrap());

    let mut rng = RngState::new(42);
    let bit = sv.measure(0, &mut rng).unwrap();
    println!("measured wire 0 -> {bit}; P(wire 1 = 1) is now {:.3}", sv.prob_one(1).unwrap());
}
