//! Rewrite passes over a flattened gate list.
//!
//! Both passes block on any op that touches a shared wire; no commutation
//! rules are applied. Each pass runs to a fixpoint.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::GateOp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    CancelInverses,
    MergeRotations,
}

impl TransformKind {
    pub const ALL: [TransformKind; 2] = [TransformKind::CancelInverses, TransformKind::MergeRotations];

    pub fn from_name(name: &str) -> Option<Self> {
        TransformKind::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::CancelInverses => "cancel_inverses",
            TransformKind::MergeRotations => "merge_rotations",
        }
    }

    pub fn apply(self, seq: &GateSequence) -> GateSequence {
        match self {
            TransformKind::CancelInverses => cancel_inverses(seq),
            TransformKind::MergeRotations => merge_rotations(seq, DEFAULT_TOLERANCE),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("transforms are unsupported on qnode '{qnode}': it performs mid-circuit measurement")]
    MidCircuitMeasurement { qnode: String },
    #[error("unknown transform '{0}'")]
    Unknown(String),
}

/// Rotations merged to an angle at most this large are dropped.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// An ordered gate list on `num_wires` wires. Each op keeps the source line
/// it came from (0 when unknown); merged rotations keep the earlier line.
#[derive(Clone, Debug, PartialEq)]
pub struct GateSequence {
    pub num_wires: usize,
    ops: Vec<GateOp>,
    lines: Vec<usize>,
}

impl GateSequence {
    pub fn new(num_wires: usize, ops: Vec<GateOp>) -> Self {
        let lines = vec![0; ops.len()];
        GateSequence {
            num_wires,
            ops,
            lines,
        }
    }

    pub fn with_lines(num_wires: usize, ops: impl IntoIterator<Item = (GateOp, usize)>) -> Self {
        let (ops, lines) = ops.into_iter().unzip();
        GateSequence {
            num_wires,
            ops,
            lines,
        }
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&GateOp, usize)> {
        self.ops.iter().zip(self.lines.iter().copied())
    }

    fn from_kept(&self, kept: Vec<(GateOp, usize)>) -> GateSequence {
        GateSequence::with_lines(self.num_wires, kept)
    }
}

/// Single left-to-right pass with a per-wire stack of surviving op indices.
/// A new op can only interact with the op on top of every one of its wires'
/// stacks, which is exactly the "nothing in between touches these wires"
/// condition. Popping after a removal re-exposes earlier ops, so chains like
/// `x h h x` collapse in one pass.
fn rewrite(
    seq: &GateSequence,
    mut combine: impl FnMut(&GateOp, &GateOp) -> Combine,
) -> GateSequence {
    let mut kept: Vec<Option<(GateOp, usize)>> = Vec::with_capacity(seq.len());
    let width = seq
        .ops
        .iter()
        .flat_map(|op| op.wires.iter().copied())
        .max()
        .map_or(seq.num_wires, |w| seq.num_wires.max(w + 1));
    let mut stacks: Vec<Vec<usize>> = vec![Vec::new(); width];
    for (op, line) in seq.iter() {
        let tops: Vec<Option<usize>> = op.wires.iter().map(|&w| stacks[w].last().copied()).collect();
        let shared = tops[0].filter(|t| tops.iter().all(|u| *u == Some(*t)));
        if let Some(prev) = shared {
            let (prev_op, _) = kept[prev].as_ref().expect("stack entries are live");
            // the previous op must sit on exactly these wires to be on top of all of them
            if prev_op.wires.len() == op.wires.len() {
                match combine(prev_op, op) {
                    Combine::Keep => {}
                    Combine::Annihilate => {
                        kept[prev] = None;
                        for &w in &op.wires {
                            stacks[w].pop();
                        }
                        continue;
                    }
                    Combine::Replace(merged) => {
                        if let Some(entry) = kept[prev].as_mut() {
                            entry.0 = merged;
                        }
                        continue;
                    }
                }
            }
        }
        let idx = kept.len();
        kept.push(Some((op.clone(), line)));
        for &w in &op.wires {
            stacks[w].push(idx);
        }
    }
    seq.from_kept(kept.into_iter().flatten().collect())
}

enum Combine {
    Keep,
    Annihilate,
    Replace(GateOp),
}

fn fixpoint(seq: &GateSequence, pass: impl Fn(&GateSequence) -> GateSequence) -> GateSequence {
    let mut current = pass(seq);
    loop {
        let next = pass(&current);
        if next.len() == current.len() && next.ops == current.ops {
            return current;
        }
        current = next;
    }
}

/// Removes adjacent-on-their-wires pairs of identical self-inverse gates.
pub fn cancel_inverses(seq: &GateSequence) -> GateSequence {
    fixpoint(seq, |s| {
        rewrite(s, |prev, op| {
            if prev.name == op.name && prev.wires == op.wires && op.name.is_self_inverse() {
                Combine::Annihilate
            } else {
                Combine::Keep
            }
        })
    })
}

/// Fuses same-axis rotations on the same wire, dropping results within `tol`
/// of zero.
pub fn merge_rotations(seq: &GateSequence, tol: f64) -> GateSequence {
    fixpoint(seq, |s| {
        rewrite(s, |prev, op| {
            if prev.name != op.name || !op.name.is_rotation() || prev.wires != op.wires {
                return Combine::Keep;
            }
            let angle = normalize_angle(prev.params[0] + op.params[0]);
            if angle.abs() <= tol {
                Combine::Annihilate
            } else {
                let mut merged = prev.clone();
                merged.params[0] = angle;
                Combine::Replace(merged)
            }
        })
    })
}

/// Maps an angle into `(-2π, 2π]`, the period of the rotation gates.
pub fn normalize_angle(angle: f64) -> f64 {
    let period = 4.0 * PI;
    let k = ((angle - 2.0 * PI) / period).ceil();
    let mut a = angle - k * period;
    // guard against rounding at the interval edges
    if a <= -2.0 * PI {
        a += period;
    } else if a > 2.0 * PI {
        a -= period;
    }
    a
}

/// Applies transforms in order, returning the output of every step.
pub fn apply_chain(seq: &GateSequence, names: &[TransformKind]) -> Vec<(TransformKind, GateSequence)> {
    let mut out: Vec<(TransformKind, GateSequence)> = Vec::with_capacity(names.len());
    for &kind in names {
        let input = out.last().map_or(seq, |(_, s)| s);
        let next = kind.apply(input);
        out.push((kind, next));
    }
    out
}

/// Like [`apply_chain`] but takes transform names as written in source.
pub fn apply_named_chain(
    seq: &GateSequence,
    names: &[&str],
) -> Result<Vec<(TransformKind, GateSequence)>, TransformError> {
    let kinds = names
        .iter()
        .map(|n| TransformKind::from_name(n).ok_or_else(|| TransformError::Unknown(n.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(apply_chain(seq, &kinds))
}
