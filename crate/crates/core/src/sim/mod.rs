//! Dense statevector simulation.
//!
//! Gate conventions: `rx(θ) = exp(-iθX/2)`, likewise `ry` and `rz`;
//! `s = diag(1, i)`, `t = diag(1, e^{iπ/4})`; `cnot(c, t)` and `toffoli(a, b, t)`
//! list their controls first. Wire 0 is the most significant bit of a basis
//! index. Terminal measurements are analytic; only `measure` samples.

mod gate;
mod rng;
mod state;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gate::{ops, Gate, GateOp};
pub use rng::RngState;
pub use state::{Statevector, MAX_QUBITS};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("wire count exceeds cap {cap}")]
    TooManyQubits { cap: usize },
    #[error("a device needs at least one wire")]
    NoQubits,
    #[error("amplitude vector length {0} is not a power of two within the cap")]
    BadLength(usize),
    #[error("wire {wire} out of range for a {num_qubits}-wire device")]
    WireOutOfRange { wire: usize, num_qubits: usize },
    #[error("wire {0} used more than once")]
    DuplicateWire(usize),
    #[error("{gate} takes {} wire(s) and {} angle(s), got {wires} and {params}",
        Gate::from_name(gate).map_or(0, Gate::num_wires),
        Gate::from_name(gate).map_or(0, Gate::num_params))]
    Arity {
        gate: &'static str,
        wires: usize,
        params: usize,
    },
    #[error("observable needs at least one factor")]
    EmptyObservable,
    #[error("internal consistency check failed (value {0})")]
    Inconsistent(f64),
}

/// Single-qubit Pauli operator, a factor of an observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_name(name: &str) -> Option<Pauli> {
        match name {
            "X" => Some(Pauli::X),
            "Y" => Some(Pauli::Y),
            "Z" => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        })
    }
}

