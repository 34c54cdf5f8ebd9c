//! Explicit-stack interpreter. All control state lives in `tasks`, so
//! execution can stop before any statement and resume later.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;
use std::time::Instant;

use super::snapshot::*;
use super::ExecLimits;
use crate::frontend::ast::*;
use crate::frontend::CONSTANTS;
use crate::sim::{GateOp, RngState, SimError, Statevector};
use crate::transforms::{GateSequence, TransformError, TransformKind};

pub(crate) struct Fault {
    pub line: usize,
    pub message: String,
    pub budget: bool,
}

impl Fault {
    fn at(line: usize, message: impl Into<String>) -> Fault {
        Fault {
            line,
            message: message.into(),
            budget: false,
        }
    }
}

pub(crate) enum Stop {
    Paused(usize),
    Finished,
    Fault(Fault),
}

enum Task {
    TopLevel { next: usize },
    Block { stmts: Arc<[Stmt]>, pc: usize },
    Loop { var: String, next: i64, end: i64, body: Block, in_iteration: bool },
    EndSubroutine,
    Epilogue { stage: usize },
}

/// A concrete terminal measurement, wires already evaluated.
#[derive(Clone)]
enum MeasureSpec {
    Expval(Vec<(Pauli, usize)>),
    Probs(Vec<usize>),
    State,
}

struct QnodeRun {
    frame: FrameId,
    name: String,
    state: Statevector,
    decorators: Vec<(TransformKind, usize)>,
    first_event: usize,
    returned: Option<(Vec<MeasureSpec>, Vec<MeasurementResult>)>,
    last_transform: Option<GateSequence>,
    output: Option<Vec<MeasurementResult>>,
}

struct EnvFrame {
    frame: FrameId,
    scopes: Vec<HashMap<String, f64>>,
}

pub(crate) struct Machine {
    qnodes: HashMap<String, QnodeDef>,
    fns: HashMap<String, FnDef>,
    calls: Vec<CallStmt>,
    breakpoints: BTreeSet<usize>,
    limits: ExecLimits,
    rng: RngState,
    tasks: Vec<Task>,
    envs: Vec<EnvFrame>,
    run: Option<QnodeRun>,
    pub events: Vec<TraceEvent>,
    pub frames: Vec<CallFrame>,
    pub outputs: Vec<QnodeOutput>,
    /// Set after pausing so the statement paused on runs on resume.
    resume: bool,
    started: Option<Instant>,
    line: usize,
}

type Exec<T> = Result<T, Fault>;

impl Machine {
    pub fn new(ast: &Ast, breakpoints: BTreeSet<usize>, seed: u64, limits: ExecLimits) -> Self {
        let mut qnodes = HashMap::new();
        let mut fns = HashMap::new();
        let mut calls = Vec::new();
        for item in &ast.items {
            match item {
                Item::Qnode(q) => {
                    qnodes.insert(q.name.name.clone(), q.clone());
                }
                Item::Fn(f) => {
                    fns.insert(f.name.name.clone(), f.clone());
                }
                Item::Call(c) => calls.push(c.clone()),
            }
        }
        Machine {
            qnodes,
            fns,
            calls,
            breakpoints,
            limits,
            rng: RngState::new(seed),
            tasks: vec![Task::TopLevel { next: 0 }],
            envs: Vec::new(),
            run: None,
            events: Vec::new(),
            frames: Vec::new(),
            outputs: Vec::new(),
            resume: false,
            started: None,
            line: 0,
        }
    }

    /// Runs until the next breakpoint, the end of the program, or a fault.
    pub fn resume(&mut self) -> Stop {
        self.started = Some(Instant::now());
        match self.drive() {
            Ok(stop) => stop,
            Err(fault) => {
                self.tasks.clear();
                Stop::Fault(fault)
            }
        }
    }

    fn drive(&mut self) -> Exec<Stop> {
        loop {
            if let (Some(max), Some(start)) = (self.limits.max_wall, self.started) {
                if start.elapsed() > max {
                    return Err(Fault {
                        line: self.line,
                        message: format!("execution budget exceeded: ran longer than {max:?}"),
                        budget: true,
                    });
                }
            }
            let Some(task) = self.tasks.last_mut() else {
                return Ok(Stop::Finished);
            };
            match task {
                Task::TopLevel { next } => {
                    let Some(call) = self.calls.get(*next).cloned() else {
                        self.tasks.pop();
                        continue;
                    };
                    if self.pause_at(call.span.start.line) {
                        return Ok(Stop::Paused(call.span.start.line));
                    }
                    self.advance();
                    self.start_qnode(&call)?;
                }
                Task::Block { stmts, pc } => {
                    let Some(stmt) = stmts.get(*pc).cloned() else {
                        self.tasks.pop();
                        self.env().scopes.pop();
                        continue;
                    };
                    let line = stmt.span().start.line;
                    if self.pause_at(line) {
                        return Ok(Stop::Paused(line));
                    }
                    self.advance();
                    self.line = line;
                    self.exec(&stmt)?;
                }
                Task::Loop {
                    var,
                    next,
                    end,
                    body,
                    in_iteration,
                } => {
                    if *in_iteration {
                        // drop the iteration scope holding the loop variable
                        *in_iteration = false;
                        self.env().scopes.pop();
                        continue;
                    }
                    if *next >= *end {
                        self.tasks.pop();
                        continue;
                    }
                    let scope = HashMap::from([(var.clone(), *next as f64)]);
                    let body = body.clone();
                    *next += 1;
                    *in_iteration = true;
                    self.env().scopes.push(scope);
                    self.push_block(&body);
                }
                Task::EndSubroutine => {
                    self.tasks.pop();
                    self.envs.pop();
                }
                Task::Epilogue { stage } => {
                    let stage = *stage;
                    if let Some(stop) = self.epilogue(stage)? {
                        return Ok(stop);
                    }
                }
            }
        }
    }

    /// Moves the top task past the item it was about to run.
    fn advance(&mut self) {
        match self.tasks.last_mut() {
            Some(Task::TopLevel { next }) => *next += 1,
            Some(Task::Block { pc, .. }) => *pc += 1,
            Some(Task::Epilogue { stage }) => *stage += 1,
            _ => {}
        }
    }

    fn pause_at(&mut self, line: usize) -> bool {
        if !self.breakpoints.contains(&line) {
            return false;
        }
        if self.resume {
            self.resume = false;
            false
        } else {
            self.resume = true;
            true
        }
    }

    fn env(&mut self) -> &mut EnvFrame {
        self.envs.last_mut().expect("an active environment")
    }

    fn push_block(&mut self, block: &Block) {
        self.env().scopes.push(HashMap::new());
        self.tasks.push(Task::Block {
            stmts: block.stmts.clone(),
            pc: 0,
        });
    }

    fn current_frame(&self) -> FrameId {
        self.envs.last().map(|e| e.frame).unwrap_or(0)
    }

    fn new_frame(&mut self, kind: FrameKind, name: &str, parent: Option<FrameId>, args: Vec<(String, f64)>, line: usize) -> FrameId {
        let id = self.frames.len();
        self.frames.push(CallFrame {
            id,
            kind,
            name: name.to_string(),
            parent,
            args,
            output: None,
            line,
            start_seq: self.events.len() as u64,
            wires: None,
            gates: None,
        });
        id
    }

    fn emit(&mut self, frame: FrameId, line: usize, payload: EventPayload) -> Exec<()> {
        if self.events.len() >= self.limits.max_events {
            return Err(Fault {
                line,
                message: format!(
                    "execution budget exceeded: more than {} events",
                    self.limits.max_events
                ),
                budget: true,
            });
        }
        let seq = self.events.len() as u64;
        self.events.push(TraceEvent {
            seq,
            frame,
            line,
            payload,
        });
        Ok(())
    }

    fn start_qnode(&mut self, call: &CallStmt) -> Exec<()> {
        let line = call.span.start.line;
        self.line = line;
        let Some(q) = self.qnodes.get(&call.callee.name).cloned() else {
            return Err(Fault::at(line, format!("'{}' is not a qnode", call.callee.name)));
        };
        let mut args = Vec::with_capacity(call.args.len());
        self.envs.push(EnvFrame {
            frame: usize::MAX,
            scopes: vec![HashMap::new()],
        });
        let values: Exec<Vec<f64>> = call.args.iter().map(|a| self.eval(a)).collect();
        self.envs.pop();
        for (p, v) in q.params.iter().zip(values?) {
            args.push((p.name.clone(), v));
        }
        let state = Statevector::with_cap(q.wires, self.limits.max_qubits)
            .map_err(|e| Fault::at(line, format!("qnode '{}': {e}", q.name.name)))?;
        let frame = self.new_frame(FrameKind::Qnode, &q.name.name, None, args.clone(), line);
        self.frames[frame].wires = Some(q.wires);
        let decorators = q
            .decorators
            .iter()
            .map(|d| {
                TransformKind::from_name(&d.transform.name)
                    .map(|k| (k, d.span.start.line))
                    .ok_or_else(|| Fault::at(d.span.start.line, TransformError::Unknown(d.transform.name.clone()).to_string()))
            })
            .collect::<Exec<Vec<_>>>()?;
        self.run = Some(QnodeRun {
            frame,
            name: q.name.name.clone(),
            state,
            decorators,
            first_event: self.events.len(),
            returned: None,
            last_transform: None,
            output: None,
        });
        self.tasks.push(Task::Epilogue { stage: 0 });
        self.envs.push(EnvFrame {
            frame,
            scopes: vec![args.into_iter().collect()],
        });
        self.push_block(&q.body);
        Ok(())
    }

    fn run_mut(&mut self) -> &mut QnodeRun {
        self.run.as_mut().expect("inside a qnode execution")
    }

    fn exec(&mut self, stmt: &Stmt) -> Exec<()> {
        let line = stmt.span().start.line;
        match stmt {
            Stmt::Gate { gate, args, .. } => {
                let mut values = Vec::with_capacity(args.len());
                for a in args {
                    values.push(self.eval(a)?);
                }
                let (params, wires) = values.split_at(gate.num_params());
                for p in params {
                    if !p.is_finite() {
                        return Err(Fault::at(line, format!("{gate}: angle is not a finite number")));
                    }
                }
                let wires = wires
                    .iter()
                    .map(|w| self.wire(*w, line))
                    .collect::<Exec<Vec<_>>>()?;
                let op = GateOp::new(*gate, wires, params.to_vec())
                    .map_err(|e| Fault::at(line, format!("{gate}: {e}")))?;
                self.run_mut()
                    .state
                    .apply(&op)
                    .map_err(|e| Fault::at(line, format!("{gate}: {e}")))?;
                let frame = self.current_frame();
                self.emit(frame, line, EventPayload::Gate(op))
            }
            Stmt::Call(call) => {
                let Some(f) = self.fns.get(&call.callee.name).cloned() else {
                    return Err(Fault::at(line, format!("undefined subroutine '{}'", call.callee.name)));
                };
                let mut args = Vec::with_capacity(call.args.len());
                for (p, a) in f.params.iter().zip(&call.args) {
                    args.push((p.name.clone(), self.eval(a)?));
                }
                let parent = self.current_frame();
                let frame = self.new_frame(FrameKind::Subroutine, &f.name.name, Some(parent), args.clone(), line);
                self.tasks.push(Task::EndSubroutine);
                self.envs.push(EnvFrame {
                    frame,
                    scopes: vec![args.into_iter().collect()],
                });
                self.push_block(&f.body);
                Ok(())
            }
            Stmt::For {
                var, start, end, body, ..
            } => {
                let from = self.eval(start)?;
                let to = self.eval(end)?;
                let from = integer(from, line, "loop bound")?;
                let to = integer(to, line, "loop bound")?;
                self.tasks.push(Task::Loop {
                    var: var.name.clone(),
                    next: from,
                    end: to,
                    body: body.clone(),
                    in_iteration: false,
                });
                Ok(())
            }
            Stmt::If {
                cond,
                then_block,
                else_block,
                ..
            } => {
                let c = self.eval(cond)?;
                if !c.is_finite() {
                    return Err(Fault::at(line, "if condition is not a finite number"));
                }
                if c != 0.0 {
                    self.push_block(then_block);
                } else if let Some(b) = else_block {
                    self.push_block(b);
                }
                Ok(())
            }
            Stmt::Let { name, value, .. } => {
                let v = self.eval(value)?;
                if let Some(scope) = self.env().scopes.last_mut() {
                    scope.insert(name.name.clone(), v);
                }
                Ok(())
            }
            Stmt::Return { measurements, .. } => {
                let mut specs = Vec::with_capacity(measurements.len());
                for m in measurements {
                    specs.push(self.measure_spec(m, line)?);
                }
                let run = self.run.as_ref().expect("inside a qnode execution");
                let values = evaluate(&run.state, &specs).map_err(|e| Fault::at(line, e.to_string()))?;
                let frame = run.frame;
                self.run_mut().returned = Some((specs, values.clone()));
                self.emit(frame, line, EventPayload::Returned { values })
            }
        }
    }

    fn measure_spec(&mut self, m: &Measurement, line: usize) -> Exec<MeasureSpec> {
        Ok(match m {
            Measurement::Expval { factors, .. } => {
                let mut obs = Vec::with_capacity(factors.len());
                for f in factors {
                    let w = self.eval(&f.wire)?;
                    obs.push((f.pauli, self.wire(w, line)?));
                }
                MeasureSpec::Expval(obs)
            }
            Measurement::Probs { wires, .. } => {
                let mut ws = Vec::with_capacity(wires.len());
                for w in wires {
                    let v = self.eval(w)?;
                    ws.push(self.wire(v, line)?);
                }
                MeasureSpec::Probs(ws)
            }
            Measurement::State { .. } => MeasureSpec::State,
        })
    }

    fn wire(&self, value: f64, line: usize) -> Exec<usize> {
        let w = integer(value, line, "wire")?;
        let n = self.run.as_ref().map_or(0, |r| r.state.num_qubits());
        if w < 0 || w as usize >= n {
            return Err(Fault::at(
                line,
                format!("wire {w} out of range for a {n}-wire device"),
            ));
        }
        Ok(w as usize)
    }

    fn eval(&mut self, expr: &Expr) -> Exec<f64> {
        Ok(match expr {
            Expr::Num { value, .. } => *value,
            Expr::Var(id) => self.lookup(&id.name).ok_or_else(|| {
                Fault::at(id.span.start.line, format!("undefined variable '{}'", id.name))
            })?,
            Expr::Measure { wire, span } => {
                let line = span.start.line;
                let w = self.eval(wire)?;
                let w = self.wire(w, line)?;
                let run = self.run.as_mut().expect("inside a qnode execution");
                let bit = run
                    .state
                    .measure(w, &mut self.rng)
                    .map_err(|e| Fault::at(line, e.to_string()))?;
                let frame = self.current_frame();
                self.emit(frame, self.line, EventPayload::Midmeasure { wire: w, bit })?;
                f64::from(bit)
            }
            Expr::Unary { operand, .. } => -self.eval(operand)?,
            Expr::Binary { op, lhs, rhs, .. } => {
                let a = self.eval(lhs)?;
                let b = self.eval(rhs)?;
                let truth = |c: bool| if c { 1.0 } else { 0.0 };
                let arith = |v: f64| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(Fault::at(self.line, format!("'{expr}' evaluates to a non-finite value")))
                    }
                };
                match op {
                    BinOp::Add => arith(a + b)?,
                    BinOp::Sub => arith(a - b)?,
                    BinOp::Mul => arith(a * b)?,
                    BinOp::Div => arith(a / b)?,
                    BinOp::Lt => truth(a < b),
                    BinOp::Le => truth(a <= b),
                    BinOp::Gt => truth(a > b),
                    BinOp::Ge => truth(a >= b),
                    BinOp::Eq => truth(a == b),
                    BinOp::Ne => truth(a != b),
                }
            }
        })
    }

    fn lookup(&self, name: &str) -> Option<f64> {
        if let Some(env) = self.envs.last() {
            for scope in env.scopes.iter().rev() {
                if let Some(v) = scope.get(name) {
                    return Some(*v);
                }
            }
        }
        CONSTANTS.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    /// Runs after the qnode body: applies each decorator in source order, then
    /// closes the qnode frame.
    fn epilogue(&mut self, stage: usize) -> Exec<Option<Stop>> {
        let run = self.run.as_ref().expect("inside a qnode execution");
        if let Some(&(kind, line)) = run.decorators.get(stage) {
            if self.pause_at(line) {
                return Ok(Some(Stop::Paused(line)));
            }
            self.line = line;
            self.advance();
            self.apply_transform(kind, line)?;
            return Ok(None);
        }
        self.tasks.pop();
        self.envs.pop();
        let run = self.run.take().expect("inside a qnode execution");
        let values = run
            .output
            .or_else(|| run.returned.map(|(_, v)| v))
            .unwrap_or_default();
        self.frames[run.frame].output = Some(values.clone());
        self.outputs.push(QnodeOutput {
            qnode: run.name,
            frame: run.frame,
            values,
        });
        Ok(None)
    }

    fn apply_transform(&mut self, kind: TransformKind, line: usize) -> Exec<()> {
        let run = self.run.as_ref().expect("inside a qnode execution");
        let input = match &run.last_transform {
            Some(seq) => seq.clone(),
            None => {
                let mut ops = Vec::new();
                for e in &self.events[run.first_event..] {
                    match &e.payload {
                        EventPayload::Gate(op) => ops.push((op.clone(), e.line)),
                        EventPayload::Midmeasure { .. } => {
                            return Err(Fault::at(
                                line,
                                TransformError::MidCircuitMeasurement {
                                    qnode: run.name.clone(),
                                }
                                .to_string(),
                            ))
                        }
                        EventPayload::Returned { .. } => {}
                    }
                }
                GateSequence::with_lines(run.state.num_qubits(), ops)
            }
        };
        let output = kind.apply(&input);
        let mut state = Statevector::with_cap(run.state.num_qubits(), self.limits.max_qubits)
            .map_err(|e| Fault::at(line, e.to_string()))?;
        for op in output.ops() {
            state.apply(op).map_err(|e| Fault::at(line, e.to_string()))?;
        }
        let values = match &run.returned {
            Some((specs, _)) => evaluate(&state, specs).map_err(|e| Fault::at(line, e.to_string()))?,
            None => Vec::new(),
        };
        let parent = run.frame;
        let frame = self.new_frame(FrameKind::TransformApplication, kind.name(), Some(parent), Vec::new(), line);
        self.frames[frame].output = Some(values.clone());
        self.frames[frame].gates = Some(
            output
                .iter()
                .map(|(op, l)| TransformedGate { op: op.clone(), line: l })
                .collect(),
        );
        self.emit(frame, line, EventPayload::Returned { values: values.clone() })?;
        let run = self.run_mut();
        run.output = Some(values);
        run.last_transform = Some(output);
        Ok(())
    }
}

fn integer(value: f64, line: usize, what: &str) -> Exec<i64> {
    if !value.is_finite() || value.fract() != 0.0 || value.abs() > (1u64 << 53) as f64 {
        return Err(Fault::at(line, format!("{what} must be an integer, got {value}")));
    }
    Ok(value as i64)
}

fn evaluate(state: &Statevector, specs: &[MeasureSpec]) -> Result<Vec<MeasurementResult>, SimError> {
    specs
        .iter()
        .map(|spec| {
            Ok(match spec {
                MeasureSpec::Expval(obs) => MeasurementResult::Expval {
                    observable: obs.clone(),
                    wires: obs.iter().map(|(_, w)| *w).collect(),
                    value: state.expval(obs)?,
                },
                MeasureSpec::Probs(wires) => MeasurementResult::Probs {
                    wires: wires.clone(),
                    values: state.probs(wires)?,
                },
                MeasureSpec::State => MeasurementResult::State {
                    wires: (0..state.num_qubits()).collect(),
                    amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
                },
            })
        })
        .collect()
}
