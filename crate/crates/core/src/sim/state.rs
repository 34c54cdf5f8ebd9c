use num_complex::Complex64;

use super::{GateOp, Pauli, RngState, SimError};

/// Largest supported register.
pub const MAX_QUBITS: usize = 20;

/// Dense pure state of `num_qubits` qubits.
///
/// Wire `k` is bit `num_qubits - 1 - k` of the basis index, so wire 0 is the
/// most significant bit: for two qubits index 1 is `|01⟩` (wire 1 set).
#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩` on `num_qubits` qubits, `1 ≤ num_qubits ≤ MAX_QUBITS`.
    pub fn new(num_qubits: usize) -> Result<Self, SimError> {
        Self::with_cap(num_qubits, MAX_QUBITS)
    }

    pub fn with_cap(num_qubits: usize, cap: usize) -> Result<Self, SimError> {
        if num_qubits == 0 {
            return Err(SimError::NoQubits);
        }
        if num_qubits > cap {
            return Err(SimError::TooManyQubits { cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { num_qubits, amps })
    }

    /// Wraps raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() < 2 || !amps.len().is_power_of_two() || n > MAX_QUBITS {
            return Err(SimError::BadLength(amps.len()));
        }
        Ok(Statevector { num_qubits: n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn bit(&self, wire: usize) -> usize {
        1 << (self.num_qubits - 1 - wire)
    }

    fn check_wire(&self, wire: usize) -> Result<(), SimError> {
        if wire >= self.num_qubits {
            Err(SimError::WireOutOfRange {
                wire,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    pub fn apply(&mut self, op: &GateOp) -> Result<(), SimError> {
        for &w in &op.wires {
            self.check_wire(w)?;
        }
        let matrix = op.name.matrix(&op.params);
        self.apply_matrix(&op.wires, &matrix);
        Ok(())
    }

    /// Applies a `2^k × 2^k` row-major matrix to `wires` (first wire = most
    /// significant bit of the matrix index).
    fn apply_matrix(&mut self, wires: &[usize], matrix: &[Complex64]) {
        let k = wires.len();
        let dim = 1 << k;
        let masks: Vec<usize> = wires.iter().map(|&w| self.bit(w)).collect();
        let all: usize = masks.iter().sum();
        // offsets[j] = full-register index offset of local basis state j
        let offsets: Vec<usize> = (0..dim)
            .map(|j| {
                masks
                    .iter()
                    .enumerate()
                    .filter(|(m, _)| j & (1 << (k - 1 - m)) != 0)
                    .map(|(_, mask)| mask)
                    .sum()
            })
            .collect();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & all != 0 {
                continue;
            }
            for (j, off) in offsets.iter().enumerate() {
                local[j] = self.amps[base + off];
            }
            for (row, off) in offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, v) in local.iter().enumerate() {
                    acc += matrix[row * dim + col] * v;
                }
                self.amps[base + off] = acc;
            }
        }
    }

    /// Probability that `wire` reads 1.
    pub fn prob_one(&self, wire: usize) -> Result<f64, SimError> {
        self.check_wire(wire)?;
        let bit = self.bit(wire);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Mid-circuit measurement of `wire` in the computational basis.
    ///
    /// Draws `u` from `rng` and reports 1 iff `u < p1`; the state collapses
    /// onto the outcome and is renormalized.
    pub fn measure(&mut self, wire: usize, rng: &mut RngState) -> Result<u8, SimError> {
        let p1 = self.prob_one(wire)?;
        if !(-1e-10..=1.0 + 1e-10).contains(&p1) {
            return Err(SimError::Inconsistent(p1));
        }
        let u = rng.next_unit();
        let outcome = u8::from(u < p1);
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        let scale = 1.0 / p.sqrt();
        let bit = self.bit(wire);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if ((i & bit != 0) as u8) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(outcome)
    }

    /// `⟨ψ|P|ψ⟩` for a Pauli word given as `(pauli, wire)` factors.
    pub fn expval(&self, factors: &[(Pauli, usize)]) -> Result<f64, SimError> {
        if factors.is_empty() {
            return Err(SimError::EmptyObservable);
        }
        for (i, (_, w)) in factors.iter().enumerate() {
            self.check_wire(*w)?;
            if factors[..i].iter().any(|(_, v)| v == w) {
                return Err(SimError::DuplicateWire(*w));
            }
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, amp) in self.amps.iter().enumerate() {
            if amp.norm_sqr() == 0.0 {
                continue;
            }
            // P|i⟩ = phase |j⟩, so ⟨ψ|P|ψ⟩ = Σ conj(ψ_j) phase ψ_i
            let mut j = i;
            let mut phase = Complex64::new(1.0, 0.0);
            for &(pauli, w) in factors {
                let bit = self.bit(w);
                let set = i & bit != 0;
                match pauli {
                    Pauli::X => j ^= bit,
                    Pauli::Y => {
                        j ^= bit;
                        phase *= if set {
                            Complex64::new(0.0, -1.0)
                        } else {
                            Complex64::new(0.0, 1.0)
                        };
                    }
                    Pauli::Z => {
                        if set {
                            phase = -phase;
                        }
                    }
                }
            }
            acc += self.amps[j].conj() * phase * amp;
        }
        if acc.im.abs() > 1e-10 {
            return Err(SimError::Inconsistent(acc.im));
        }
        Ok(acc.re)
    }

    /// Marginal distribution over `wires`, first listed wire most significant.
    pub fn probs(&self, wires: &[usize]) -> Result<Vec<f64>, SimError> {
        for (i, w) in wires.iter().enumerate() {
            self.check_wire(*w)?;
            if wires[..i].contains(w) {
                return Err(SimError::DuplicateWire(*w));
            }
        }
        let k = wires.len();
        let mut out = vec![0.0; 1 << k];
        for (i, a) in self.amps.iter().enumerate() {
            let mut idx = 0;
            for &w in wires {
                idx = (idx << 1) | usize::from(i & self.bit(w) != 0);
            }
            out[idx] += a.norm_sqr();
        }
        Ok(out)
    }
}
