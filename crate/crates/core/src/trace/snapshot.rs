use serde::{Deserialize, Serialize};

use super::TraceError;
use crate::sim::{GateOp, Pauli};

pub type FrameId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Qnode,
    Subroutine,
    TransformApplication,
}

/// One invocation of a qnode, a subroutine, or a transform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CallFrame {
    pub id: FrameId,
    pub kind: FrameKind,
    pub name: String,
    pub parent: Option<FrameId>,
    pub args: Vec<(String, f64)>,
    /// Set when a qnode or transform frame completes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<Vec<MeasurementResult>>,
    /// Line of the call site, or of the decorator for transform frames.
    pub line: usize,
    /// Sequence number the next event had when this frame was entered.
    pub start_seq: u64,
    /// Device width, qnode frames only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wires: Option<usize>,
    /// Post-transform gate list, transform frames only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gates: Option<Vec<TransformedGate>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformedGate {
    #[serde(flatten)]
    pub op: GateOp,
    pub line: usize,
}

/// A terminal measurement and its analytic value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasurementResult {
    Expval {
        observable: Vec<(Pauli, usize)>,
        wires: Vec<usize>,
        value: f64,
    },
    Probs {
        wires: Vec<usize>,
        values: Vec<f64>,
    },
    /// Amplitudes as `[re, im]` pairs, wire 0 most significant.
    State {
        wires: Vec<usize>,
        amplitudes: Vec<[f64; 2]>,
    },
}

impl MeasurementResult {
    pub fn kind(&self) -> &'static str {
        match self {
            MeasurementResult::Expval { .. } => "expval",
            MeasurementResult::Probs { .. } => "probs",
            MeasurementResult::State { .. } => "state",
        }
    }

    pub fn wires(&self) -> &[usize] {
        match self {
            MeasurementResult::Expval { wires, .. }
            | MeasurementResult::Probs { wires, .. }
            | MeasurementResult::State { wires, .. } => wires,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EventPayload {
    Gate(GateOp),
    Midmeasure { wire: usize, bit: u8 },
    Returned { values: Vec<MeasurementResult> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    pub frame: FrameId,
    pub line: usize,
    pub payload: EventPayload,
}

impl TraceEvent {
    /// Wires touched by a gate or mid-circuit measurement.
    pub fn wires(&self) -> &[usize] {
        match &self.payload {
            EventPayload::Gate(op) => &op.wires,
            EventPayload::Midmeasure { wire, .. } => std::slice::from_ref(wire),
            EventPayload::Returned { .. } => &[],
        }
    }

    pub fn is_circuit_op(&self) -> bool {
        !matches!(self.payload, EventPayload::Returned { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Paused { line: usize },
    Finished,
    RuntimeError { line: usize, message: String },
}

/// Result of one completed top-level qnode call.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QnodeOutput {
    pub qnode: String,
    pub frame: FrameId,
    pub values: Vec<MeasurementResult>,
}

/// Debug state at a pause or at the end of a run. Never mutated once built.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    #[serde(flatten)]
    pub status: Status,
    pub frames: Vec<CallFrame>,
    pub events: Vec<TraceEvent>,
    pub outputs: Vec<QnodeOutput>,
    pub unbound_breakpoints: Vec<usize>,
}

/// Arguments and, for completed qnode/transform frames, output of a frame.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameDetail {
    pub frame: FrameId,
    pub args: Vec<(String, f64)>,
    pub output: Option<Vec<MeasurementResult>>,
}

impl Snapshot {
    pub fn frame(&self, id: FrameId) -> Result<&CallFrame, TraceError> {
        // ids are assigned densely in execution order
        self.frames
            .get(id)
            .filter(|f| f.id == id)
            .or_else(|| self.frames.iter().find(|f| f.id == id))
            .ok_or(TraceError::UnknownFrame(id))
    }

    pub fn children(&self, id: FrameId) -> impl Iterator<Item = &CallFrame> {
        self.frames.iter().filter(move |f| f.parent == Some(id))
    }

    pub fn roots(&self) -> impl Iterator<Item = &CallFrame> {
        self.frames.iter().filter(|f| f.parent.is_none())
    }

    /// Whether `id` is `ancestor` or lies below it in the call tree.
    pub fn is_descendant(&self, id: FrameId, ancestor: FrameId) -> bool {
        let mut cur = Some(id);
        while let Some(c) = cur {
            if c == ancestor {
                return true;
            }
            cur = self.frame(c).ok().and_then(|f| f.parent);
        }
        false
    }

    /// Events emitted by `id` or any frame beneath it, in seq order.
    pub fn subtree_events(&self, id: FrameId) -> impl Iterator<Item = &TraceEvent> {
        self.events
            .iter()
            .filter(move |e| self.is_descendant(e.frame, id))
    }

    pub fn is_finished(&self) -> bool {
        matches!(self.status, Status::Finished)
    }

    pub fn paused_line(&self) -> Option<usize> {
        match self.status {
            Status::Paused { line } => Some(line),
            _ => None,
        }
    }

    /// Indented call tree, one frame per line.
    pub fn tree_text(&self) -> String {
        let mut out = String::new();
        for root in self.roots() {
            self.tree_lines(root, 0, &mut out);
        }
        out
    }

    fn tree_lines(&self, frame: &CallFrame, depth: usize, out: &mut String) {
        let args = frame
            .args
            .iter()
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        out.push_str(&format!("{}{} #{} ({args})", "  ".repeat(depth), frame.name, frame.id));
        if let Some(output) = &frame.output {
            let vals = output.iter().map(format_result).collect::<Vec<_>>().join(", ");
            out.push_str(&format!(" -> {vals}"));
        }
        out.push('\n');
        for child in self.children(frame.id) {
            self.tree_lines(child, depth + 1, out);
        }
    }
}

fn format_result(r: &MeasurementResult) -> String {
    match r {
        MeasurementResult::Expval { observable, value, .. } => {
            let obs = observable
                .iter()
                .map(|(p, w)| format!("{p}({w})"))
                .collect::<Vec<_>>()
                .join("@");
            format!("expval({obs})={value:.6}")
        }
        MeasurementResult::Probs { wires, values } => {
            let vals = values.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join(", ");
            format!("probs{wires:?}=[{vals}]")
        }
        MeasurementResult::State { amplitudes, .. } => format!("state[{} amplitudes]", amplitudes.len()),
    }
}

/// Looks up a frame's arguments and output.
pub fn frame_detail(snapshot: &Snapshot, id: FrameId) -> Result<FrameDetail, TraceError> {
    let frame = snapshot.frame(id)?;
    Ok(FrameDetail {
        frame: id,
        args: frame.args.clone(),
        output: frame.output.clone(),
    })
}
