//! Laid-out circuit views of a snapshot.
//!
//! A view shows one frame: its own gates and mid-circuit measurements, plus
//! one box per direct child subroutine call. Cells are packed greedily in
//! event order, each going one column right of the last cell on any row it
//! covers.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::trace::{CallFrame, EventPayload, FrameId, FrameKind, MeasurementResult, Snapshot, TraceError, TraceEvent};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error(transparent)]
    Lookup(#[from] TraceError),
    #[error("frame {0} is a transform application; use transform_view")]
    TransformFrame(FrameId),
    #[error("frame {0} is not a transform application")]
    NotTransform(FrameId),
    #[error("transform frame {0} has not executed yet")]
    NotReady(FrameId),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Cell {
    Gate {
        name: String,
        wires: Vec<usize>,
        params: Vec<f64>,
        line: usize,
    },
    Box {
        frame: FrameId,
        label: String,
        wire_min: usize,
        wire_max: usize,
        /// The call has touched no wires yet.
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        degenerate: bool,
    },
    Midmeasure {
        wire: usize,
    },
    Terminal {
        kind: String,
        wires: Vec<usize>,
    },
}

impl Cell {
    /// Inclusive row range covered by the cell.
    pub fn rows(&self) -> (usize, usize) {
        match self {
            Cell::Gate { wires, .. } | Cell::Terminal { wires, .. } => {
                let lo = wires.iter().copied().min().unwrap_or(0);
                let hi = wires.iter().copied().max().unwrap_or(0);
                (lo, hi)
            }
            Cell::Box { wire_min, wire_max, .. } => (*wire_min, *wire_max),
            Cell::Midmeasure { wire } => (*wire, *wire),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircuitView {
    pub wires: usize,
    pub columns: Vec<Vec<Cell>>,
}

impl CircuitView {
    fn new(wires: usize) -> Self {
        CircuitView { wires, columns: Vec::new() }
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> {
        self.columns.iter().flatten()
    }

    /// Places `cell` one column right of the last cell on any row it spans.
    fn place(&mut self, cell: Cell, last_col: &mut Vec<usize>) {
        let (lo, hi) = cell.rows();
        if last_col.len() <= hi {
            last_col.resize(hi + 1, 0);
        }
        let col = last_col[lo..=hi].iter().copied().max().unwrap_or(0);
        if self.columns.len() <= col {
            self.columns.resize_with(col + 1, Vec::new);
        }
        self.columns[col].push(cell);
        for r in &mut last_col[lo..=hi] {
            *r = col + 1;
        }
    }

    /// ASCII drawing, one text row per wire.
    pub fn to_text(&self) -> String {
        let n = self.wires.max(1);
        let mut rows: Vec<String> = (0..n).map(|w| format!("{w:>2}: ")).collect();
        for column in &self.columns {
            let mut labels: Vec<Option<String>> = vec![None; n];
            for cell in column {
                let (lo, hi) = cell.rows();
                match cell {
                    Cell::Gate { name, wires, params, .. } => {
                        let p = if params.is_empty() {
                            String::new()
                        } else {
                            let ps: Vec<String> = params.iter().map(|v| format!("{v:.3}")).collect();
                            format!("({})", ps.join(","))
                        };
                        for (i, w) in wires.iter().enumerate() {
                            let text = if wires.len() > 1 && i + 1 < wires.len() && name != "swap" {
                                "*".to_string()
                            } else if name == "swap" {
                                "x".to_string()
                            } else {
                                match name.as_str() {
                                    "cnot" | "toffoli" => "X".to_string(),
                                    "cz" => "Z".to_string(),
                                    _ => format!("{}{p}", name.to_uppercase()),
                                }
                            };
                            set(&mut labels, *w, text);
                        }
                        for r in lo..=hi {
                            if labels[r].is_none() {
                                labels[r] = Some("|".into());
                            }
                        }
                    }
                    Cell::Box { label, .. } => {
                        for r in lo..=hi {
                            set(&mut labels, r, format!("[{label}]"));
                        }
                    }
                    Cell::Midmeasure { wire } => set(&mut labels, *wire, "M".into()),
                    Cell::Terminal { kind, wires } => {
                        for w in wires {
                            set(&mut labels, *w, format!("<{kind}>"));
                        }
                    }
                }
            }
            let width = labels.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
            for (r, row) in rows.iter_mut().enumerate() {
                let label = labels[r].as_deref().unwrap_or("");
                let pad = width - label.chars().count();
                let _ = write!(row, "-{label}{}-", "-".repeat(pad));
            }
        }
        rows.join("\n") + "\n"
    }
}

fn set(labels: &mut [Option<String>], row: usize, text: String) {
    if let Some(slot) = labels.get_mut(row) {
        *slot = Some(text);
    }
}

fn device_wires(snapshot: &Snapshot, frame: &CallFrame) -> usize {
    let mut root = frame;
    while let Some(p) = root.parent.and_then(|p| snapshot.frame(p).ok()) {
        root = p;
    }
    root.wires.unwrap_or(0)
}

fn terminals(view: &mut CircuitView, output: &[MeasurementResult], last_col: &mut Vec<usize>) {
    for r in output {
        view.place(
            Cell::Terminal {
                kind: r.kind().to_string(),
                wires: r.wires().to_vec(),
            },
            last_col,
        );
    }
}

/// Circuit of a qnode or subroutine frame with child calls drawn as boxes.
pub fn build_view(snapshot: &Snapshot, frame: FrameId) -> Result<CircuitView, RenderError> {
    let f = snapshot.frame(frame)?;
    if f.kind == FrameKind::TransformApplication {
        return Err(RenderError::TransformFrame(frame));
    }

    // (seq, tiebreak, index) so a box sorts before events issued after its call
    enum Item<'a> {
        Event(&'a TraceEvent),
        Child(&'a CallFrame),
    }
    let mut items: Vec<((u64, u8, usize), Item)> = Vec::new();
    for e in snapshot.events.iter().filter(|e| e.frame == frame && e.is_circuit_op()) {
        items.push(((e.seq, 1, 0), Item::Event(e)));
    }
    for c in snapshot.children(frame).filter(|c| c.kind == FrameKind::Subroutine) {
        items.push(((c.start_seq, 0, c.id), Item::Child(c)));
    }
    items.sort_by_key(|(k, _)| *k);

    let mut view = CircuitView::new(device_wires(snapshot, f));
    let mut last_col = vec![0; view.wires];
    let mut counts: Vec<(String, usize)> = Vec::new();
    let mut placed_min: Option<usize> = None;

    for (_, item) in items {
        let cell = match item {
            Item::Event(e) => match &e.payload {
                EventPayload::Gate(op) => Cell::Gate {
                    name: op.name.name().to_string(),
                    wires: op.wires.clone(),
                    params: op.params.clone(),
                    line: e.line,
                },
                EventPayload::Midmeasure { wire, .. } => Cell::Midmeasure { wire: *wire },
                EventPayload::Returned { .. } => continue,
            },
            Item::Child(c) => {
                let k = match counts.iter_mut().find(|(n, _)| *n == c.name) {
                    Some((_, k)) => {
                        *k += 1;
                        *k
                    }
                    None => {
                        counts.push((c.name.clone(), 1));
                        1
                    }
                };
                let touched: BTreeSet<usize> = snapshot
                    .subtree_events(c.id)
                    .flat_map(|e| e.wires().iter().copied())
                    .collect();
                let label = format!("{}#{k}", c.name);
                match (touched.first(), touched.last()) {
                    (Some(&lo), Some(&hi)) => Cell::Box {
                        frame: c.id,
                        label,
                        wire_min: lo,
                        wire_max: hi,
                        degenerate: false,
                    },
                    _ => {
                        let row = placed_min.unwrap_or(0);
                        Cell::Box {
                            frame: c.id,
                            label,
                            wire_min: row,
                            wire_max: row,
                            degenerate: true,
                        }
                    }
                }
            }
        };
        let (lo, _) = cell.rows();
        placed_min = Some(placed_min.map_or(lo, |m| m.min(lo)));
        view.wires = view.wires.max(cell.rows().1 + 1);
        view.place(cell, &mut last_col);
    }

    if f.kind == FrameKind::Qnode {
        if let Some(output) = &f.output {
            // terminals describe what the body returned, before any transform
            let returned = snapshot
                .events
                .iter()
                .find_map(|e| match &e.payload {
                    EventPayload::Returned { values } if e.frame == frame => Some(values.as_slice()),
                    _ => None,
                })
                .unwrap_or(output);
            terminals(&mut view, returned, &mut last_col);
        }
    }
    Ok(view)
}

/// Flat circuit of a completed transform application.
pub fn transform_view(snapshot: &Snapshot, frame: FrameId) -> Result<CircuitView, RenderError> {
    let f = snapshot.frame(frame)?;
    if f.kind != FrameKind::TransformApplication {
        return Err(RenderError::NotTransform(frame));
    }
    let (Some(gates), Some(output)) = (&f.gates, &f.output) else {
        return Err(RenderError::NotReady(frame));
    };
    let wires = f
        .parent
        .and_then(|p| snapshot.frame(p).ok())
        .map_or(0, |p| device_wires(snapshot, p));
    let mut view = CircuitView::new(wires);
    let mut last_col = vec![0; wires];
    for g in gates {
        let cell = Cell::Gate {
            name: g.op.name.name().to_string(),
            wires: g.op.wires.clone(),
            params: g.op.params.clone(),
            line: g.line,
        };
        view.wires = view.wires.max(cell.rows().1 + 1);
        view.place(cell, &mut last_col);
    }
    terminals(&mut view, output, &mut last_col);
    Ok(view)
}

/// Dispatches to [`build_view`] or [`transform_view`] by frame kind.
pub fn view_for(snapshot: &Snapshot, frame: FrameId) -> Result<CircuitView, RenderError> {
    match snapshot.frame(frame)?.kind {
        FrameKind::TransformApplication => transform_view(snapshot, frame),
        _ => build_view(snapshot, frame),
    }
}
