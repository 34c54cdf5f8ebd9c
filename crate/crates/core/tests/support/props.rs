//! Property checkers shared by the test suites and the acceptance gate.

use std::collections::{BTreeSet, HashMap};

use qdbg_core::frontend::ast::{Ast, Block, Item, Stmt};
use qdbg_core::frontend::{compile, executable_lines};
use qdbg_core::render::{build_view, Cell, CircuitView};
use qdbg_core::trace::{run_to_end, DebugSession, EventPayload, FrameKind, Snapshot, TraceEvent};

fn ast(src: &str) -> Ast {
    compile(src).unwrap_or_else(|d| panic!("{d:?}\n{src}")).0
}

/// Lines whose only statement is a single gate.
fn lone_gate_lines(ast: &Ast, src: &str) -> BTreeSet<usize> {
    fn walk(b: &Block, out: &mut Vec<(usize, bool)>) {
        for s in b.stmts.iter() {
            out.push((s.span().start.line, matches!(s, Stmt::Gate { .. })));
            match s {
                Stmt::For { body, .. } => walk(body, out),
                Stmt::If {
                    then_block,
                    else_block,
                    ..
                } => {
                    walk(then_block, out);
                    if let Some(e) = else_block {
                        walk(e, out);
                    }
                }
                _ => {}
            }
        }
    }
    let mut starts = Vec::new();
    for item in &ast.items {
        match item {
            Item::Qnode(q) => walk(&q.body, &mut starts),
            Item::Fn(f) => walk(&f.body, &mut starts),
            Item::Call(c) => starts.push((c.span.start.line, false)),
        }
    }
    let lines: BTreeSet<usize> = starts.iter().map(|s| s.0).collect();
    lines
        .into_iter()
        .filter(|l| {
            let here: Vec<_> = starts.iter().filter(|s| s.0 == *l).collect();
            // a line like `if c { x(0); }` also starts a gate; require a bare gate line
            here.len() == 1 && here[0].1 && src.lines().nth(l - 1).unwrap().trim_end().ends_with(';')
        })
        .collect()
}

pub fn check_breakpoints(src: &str, bps: &BTreeSet<usize>, seed: u64) -> Result<(), String> {
    let a = ast(src);
    let reference = run_to_end(&a, seed).unwrap();
    let all: Vec<usize> = executable_lines(&a).into_iter().collect();

    let mut full = DebugSession::start(&a, all.clone(), seed).unwrap();
    let full_pauses: Vec<usize> = full.run_all().iter().filter_map(|s| s.paused_line()).collect();

    let mut s = DebugSession::start(&a, bps.iter().copied(), seed).unwrap();
    let snaps = s.run_all();
    let last = snaps.last().unwrap();

    // equivalence with the breakpoint-free run
    if (&last.status, &last.events, &last.frames, &last.outputs)
        != (&reference.status, &reference.events, &reference.frames, &reference.outputs)
    {
        return Err("final snapshot differs from run_to_end".into());
    }
    // prefix property; frames only gain their output on completion
    let skeleton = |s: &Snapshot| {
        s.frames
            .iter()
            .map(|f| (f.id, f.kind, f.name.clone(), f.parent, f.args.clone(), f.line, f.start_seq))
            .collect::<Vec<_>>()
    };
    for w in snaps.windows(2) {
        if !w[1].events.starts_with(&w[0].events) || !skeleton(&w[1]).starts_with(&skeleton(&w[0])) {
            return Err("events/frames are not a prefix of the next snapshot".into());
        }
    }
    // completeness: pauses are exactly the full pause sequence restricted to B
    let pauses: Vec<usize> = snaps.iter().filter_map(|s| s.paused_line()).collect();
    let expected: Vec<usize> = full_pauses.iter().copied().filter(|l| bps.contains(l)).collect();
    if pauses != expected {
        return Err(format!("pauses {pauses:?}, expected {expected:?}"));
    }
    // one pause per dynamic execution, and nothing from the paused statement yet
    let lone = lone_gate_lines(&a, src);
    for &l in &lone {
        let executed = reference.events.iter().filter(|e| e.line == l && e.is_circuit_op()).count();
        let paused = full_pauses.iter().filter(|p| **p == l).count();
        if reference.is_finished() && executed != paused {
            return Err(format!("line {l}: {executed} executions but {paused} pauses"));
        }
    }
    let mut hits = std::collections::HashMap::new();
    for snap in &snaps {
        if let Some(l) = snap.paused_line() {
            let k = hits.entry(l).or_insert(0usize);
            if lone.contains(&l) {
                let done = snap.events.iter().filter(|e| e.line == l && e.is_circuit_op()).count();
                if done != *k {
                    return Err(format!("paused at {l} with {done} events from it after {k} earlier pauses"));
                }
            }
            *k += 1;
        }
    }
    // decorators pause once per transform application
    for f in last.frames.iter().filter(|f| f.kind == FrameKind::TransformApplication) {
        if !full_pauses.contains(&f.line) {
            return Err(format!("decorator line {} never paused", f.line));
        }
    }
    if last.is_finished() {
        let d = super::replay_deviation(last, super::wire_counts(src));
        if d > 1e-9 {
            return Err(format!("oracle replay deviates by {d}"));
        }
    }
    Ok(())
}

pub fn random_breakpoints(src: &str, seed: u64) -> BTreeSet<usize> {
    let mut g = super::Gen::new(seed);
    let lines = src.lines().count() + 2;
    (1..=lines).filter(|_| g.chance(35)).collect()
}

/// Replaces boxes by their frames' views, recursively, yielding the leaf
/// cells in column order.
fn flatten(snap: &Snapshot, view: &CircuitView, out: &mut Vec<Cell>) {
    for cell in view.cells() {
        match cell {
            Cell::Box { frame, .. } => flatten(snap, &build_view(snap, *frame).unwrap(), out),
            Cell::Terminal { .. } => {}
            other => out.push(other.clone()),
        }
    }
}

fn event_cell(e: &TraceEvent) -> Option<Cell> {
    match &e.payload {
        EventPayload::Gate(op) => Some(Cell::Gate {
            name: op.name.name().to_string(),
            wires: op.wires.clone(),
            params: op.params.clone(),
            line: e.line,
        }),
        EventPayload::Midmeasure { wire, .. } => Some(Cell::Midmeasure { wire: *wire }),
        EventPayload::Returned { .. } => None,
    }
}

fn rows(c: &Cell) -> BTreeSet<usize> {
    let (lo, hi) = c.rows();
    (lo..=hi).collect()
}

pub fn check_view_invariants(snap: &Snapshot, frame: usize) -> Result<(), String> {
    let view = build_view(snap, frame).map_err(|e| e.to_string())?;

    // no overlap within a column
    for (i, col) in view.columns.iter().enumerate() {
        let mut used = BTreeSet::new();
        for c in col {
            for r in rows(c) {
                if !used.insert(r) {
                    return Err(format!("column {i} overlaps on row {r}"));
                }
            }
        }
    }

    // event conservation: the flattened cells are the subtree's events, and
    // every pair sharing a wire keeps its seq order
    let mut flat = Vec::new();
    flatten(snap, &view, &mut flat);
    let events: Vec<_> = snap.subtree_events(frame).filter(|e| e.is_circuit_op()).collect();
    if flat.len() != events.len() {
        return Err(format!("{} flattened cells for {} events", flat.len(), events.len()));
    }
    let mut want: HashMap<String, usize> = HashMap::new();
    for e in &events {
        *want.entry(format!("{:?}", event_cell(e).unwrap())).or_default() += 1;
    }
    let mut got: HashMap<String, usize> = HashMap::new();
    for c in &flat {
        *got.entry(format!("{c:?}")).or_default() += 1;
    }
    if want != got {
        return Err("flattened cells differ from subtree events".into());
    }
    // per wire, the flattened order must equal seq order
    let per_wire = |cells: &mut dyn Iterator<Item = (Cell, BTreeSet<usize>)>| {
        let mut m: HashMap<usize, Vec<String>> = HashMap::new();
        for (c, ws) in cells {
            for w in ws {
                m.entry(w).or_default().push(format!("{c:?}"));
            }
        }
        m
    };
    let wires_of = |c: &Cell| -> BTreeSet<usize> {
        match c {
            Cell::Gate { wires, .. } => wires.iter().copied().collect(),
            Cell::Midmeasure { wire } => [*wire].into(),
            _ => BTreeSet::new(),
        }
    };
    let a = per_wire(&mut flat.iter().map(|c| (c.clone(), wires_of(c))));
    let b = per_wire(&mut events.iter().map(|e| {
        let c = event_cell(e).unwrap();
        let w = wires_of(&c);
        (c, w)
    }));
    if a != b {
        return Err("flattening breaks per-wire seq order".into());
    }

    // box tightness and labels
    let mut counts: HashMap<String, usize> = HashMap::new();
    let mut boxes: Vec<(usize, &Cell)> = Vec::new();
    for (i, col) in view.columns.iter().enumerate() {
        for c in col {
            if let Cell::Box { .. } = c {
                boxes.push((i, c));
            }
        }
    }
    let children: Vec<_> = snap.children(frame).filter(|f| f.kind == FrameKind::Subroutine).collect();
    if boxes.len() != children.len() {
        return Err(format!("{} boxes for {} child calls", boxes.len(), children.len()));
    }
    for child in children {
        let k = counts.entry(child.name.clone()).or_default();
        *k += 1;
        let cell = boxes
            .iter()
            .find(|(_, c)| matches!(c, Cell::Box { frame, .. } if *frame == child.id))
            .ok_or("missing box")?
            .1;
        let Cell::Box {
            label,
            wire_min,
            wire_max,
            degenerate,
            ..
        } = cell
        else {
            unreachable!()
        };
        if *label != format!("{}#{k}", child.name) {
            return Err(format!("label {label} for call {k} of {}", child.name));
        }
        let touched: BTreeSet<usize> = snap.subtree_events(child.id).flat_map(|e| e.wires().to_vec()).collect();
        match (touched.first(), touched.last()) {
            (Some(lo), Some(hi)) => {
                if (*wire_min, *wire_max, *degenerate) != (*lo, *hi, false) {
                    return Err(format!("box {label} spans {wire_min}..{wire_max}, touched {lo}..{hi}"));
                }
            }
            _ => {
                if !degenerate || wire_min != wire_max {
                    return Err(format!("empty box {label} is not degenerate"));
                }
            }
        }
    }
    Ok(())
}

/// Paused cells are a subset of finished cells, boxes possibly narrower.
pub fn monotone(paused: &CircuitView, done: &CircuitView) -> Result<(), String> {
    let mut pool: Vec<&Cell> = done.cells().collect();
    for c in paused.cells() {
        let idx = pool.iter().position(|d| match (c, d) {
            (Cell::Box { frame: a, label: la, .. }, Cell::Box { frame: b, label: lb, .. }) => a == b && la == lb,
            _ => c == *d,
        });
        match idx {
            Some(i) => {
                pool.remove(i);
            }
            None => return Err(format!("{c:?} missing from finished view")),
        }
    }
    Ok(())
}

pub fn check_monotone(src: &str, seed: u64) -> Result<(), String> {
    let ast = compile(src).unwrap().0;
    let lines: Vec<usize> = qdbg_core::frontend::executable_lines(&ast).into_iter().collect();
    let mut s = DebugSession::start(&ast, lines, seed).unwrap();
    let snaps = s.run_all();
    let last = snaps.last().unwrap();
    for snap in &snaps {
        for f in snap.frames.iter().filter(|f| f.kind != FrameKind::TransformApplication) {
            check_view_invariants(snap, f.id)?;
            monotone(&build_view(snap, f.id).unwrap(), &build_view(last, f.id).unwrap())?;
        }
    }
    Ok(())
}

