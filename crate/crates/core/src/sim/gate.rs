use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SimError;

/// The fixed QDL gate set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gate {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    Cnot,
    Cz,
    Swap,
    Toffoli,
}

impl Gate {
    pub const ALL: [Gate; 13] = [
        Gate::H,
        Gate::X,
        Gate::Y,
        Gate::Z,
        Gate::S,
        Gate::T,
        Gate::Rx,
        Gate::Ry,
        Gate::Rz,
        Gate::Cnot,
        Gate::Cz,
        Gate::Swap,
        Gate::Toffoli,
    ];

    pub fn from_name(name: &str) -> Option<Gate> {
        Gate::ALL.iter().copied().find(|g| g.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Gate::H => "h",
            Gate::X => "x",
            Gate::Y => "y",
            Gate::Z => "z",
            Gate::S => "s",
            Gate::T => "t",
            Gate::Rx => "rx",
            Gate::Ry => "ry",
            Gate::Rz => "rz",
            Gate::Cnot => "cnot",
            Gate::Cz => "cz",
            Gate::Swap => "swap",
            Gate::Toffoli => "toffoli",
        }
    }

    pub fn num_wires(self) -> usize {
        match self {
            Gate::Cnot | Gate::Cz | Gate::Swap => 2,
            Gate::Toffoli => 3,
            _ => 1,
        }
    }

    pub fn num_params(self) -> usize {
        usize::from(self.is_rotation())
    }

    /// Total argument count in source: angle first, then wires.
    pub fn arity(self) -> usize {
        self.num_wires() + self.num_params()
    }

    pub fn is_rotation(self) -> bool {
        matches!(self, Gate::Rx | Gate::Ry | Gate::Rz)
    }

    /// Gates that are their own inverse.
    pub fn is_self_inverse(self) -> bool {
        !matches!(self, Gate::S | Gate::T | Gate::Rx | Gate::Ry | Gate::Rz)
    }

    /// Dense unitary in the gate's own wire order, row-major, dimension
    /// `2^num_wires`. The first listed wire is the most significant bit, so for
    /// `cnot` and `toffoli` the controls come first.
    pub fn matrix(self, params: &[f64]) -> Vec<Complex64> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        let l = c(1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let theta = params.first().copied().unwrap_or(0.0);
        let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self {
            Gate::H => vec![c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)],
            Gate::X => vec![o, l, l, o],
            Gate::Y => vec![o, c(0.0, -1.0), c(0.0, 1.0), o],
            Gate::Z => vec![l, o, o, -l],
            Gate::S => vec![l, o, o, c(0.0, 1.0)],
            Gate::T => vec![l, o, o, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            Gate::Rx => vec![c(cos, 0.0), c(0.0, -sin), c(0.0, -sin), c(cos, 0.0)],
            Gate::Ry => vec![c(cos, 0.0), c(-sin, 0.0), c(sin, 0.0), c(cos, 0.0)],
            Gate::Rz => vec![c(cos, -sin), o, o, c(cos, sin)],
            Gate::Cnot => permutation(4, |i| match i {
                2 => 3,
                3 => 2,
                i => i,
            }),
            Gate::Cz => {
                let mut m = permutation(4, |i| i);
                m[15] = -l;
                m
            }
            Gate::Swap => permutation(4, |i| match i {
                1 => 2,
                2 => 1,
                i => i,
            }),
            Gate::Toffoli => permutation(8, |i| match i {
                6 => 7,
                7 => 6,
                i => i,
            }),
        }
    }
}

/// Matrix sending basis state `i` to `map(i)`.
fn permutation(dim: usize, map: impl Fn(usize) -> usize) -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        m[map(col) * dim + col] = Complex64::new(1.0, 0.0);
    }
    m
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate application: the gate, its ordered wires and its angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub name: Gate,
    pub wires: Vec<usize>,
    pub params: Vec<f64>,
}

impl GateOp {
    /// Builds an op, checking wire/parameter counts and wire distinctness.
    pub fn new(gate: Gate, wires: Vec<usize>, params: Vec<f64>) -> Result<GateOp, SimError> {
        if wires.len() != gate.num_wires() || params.len() != gate.num_params() {
            return Err(SimError::Arity {
                gate: gate.name(),
                wires: wires.len(),
                params: params.len(),
            });
        }
        for (i, w) in wires.iter().enumerate() {
            if wires[..i].contains(w) {
                return Err(SimError::DuplicateWire(*w));
            }
        }
        Ok(GateOp {
            name: gate,
            wires,
            params,
        })
    }

    pub fn gate(&self) -> Gate {
        self.name
    }

    pub fn touches(&self, wire: usize) -> bool {
        self.wires.contains(&wire)
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name)?;
        let mut first = true;
        for p in &self.params {
            write!(f, "{p}")?;
            first = false;
        }
        for w in &self.wires {
            if !first {
                f.write_str(", ")?;
            }
            write!(f, "{w}")?;
            first = false;
        }
        f.write_str(")")
    }
}

/// Convenience constructors, mostly for tests and examples.
pub mod ops {
    use super::{Gate, GateOp};

    fn op(gate: Gate, wires: &[usize], params: &[f64]) -> GateOp {
        GateOp::new(gate, wires.to_vec(), params.to_vec()).expect("valid gate op")
    }

    pub fn h(w: usize) -> GateOp {
        op(Gate::H, &[w], &[])
    }
    pub fn x(w: usize) -> GateOp {
        op(Gate::X, &[w], &[])
    }
    pub fn y(w: usize) -> GateOp {
        op(Gate::Y, &[w], &[])
    }
    pub fn z(w: usize) -> GateOp {
        op(Gate::Z, &[w], &[])
    }
    pub fn s(w: usize) -> GateOp {
        op(Gate::S, &[w], &[])
    }
    pub fn t(w: usize) -> GateOp {
        op(Gate::T, &[w], &[])
    }
    pub fn rx(theta: f64, w: usize) -> GateOp {
        op(Gate::Rx, &[w], &[theta])
    }
    pub fn ry(theta: f64, w: usize) -> GateOp {
        op(Gate::Ry, &[w], &[theta])
    }
    pub fn rz(theta: f64, w: usize) -> GateOp {
        op(Gate::Rz, &[w], &[theta])
    }
    pub fn cnot(c: usize, t: usize) -> GateOp {
        op(Gate::Cnot, &[c, t], &[])
    }
    pub fn cz(a: usize, b: usize) -> GateOp {
        op(Gate::Cz, &[a, b], &[])
    }
    pub fn swap(a: usize, b: usize) -> GateOp {
        op(Gate::Swap, &[a, b], &[])
    }
    pub fn toffoli(a: usize, b: usize, t: usize) -> GateOp {
        op(Gate::Toffoli, &[a, b, t], &[])
    }
}
