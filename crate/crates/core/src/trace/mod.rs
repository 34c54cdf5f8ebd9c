//! Tracing interpreter and breakpoint engine.
//!
//! A [`DebugSession`] executes a checked program statement by statement,
//! recording every gate, mid-circuit measurement and return as a
//! [`TraceEvent`] attributed to a [`CallFrame`]. Execution pauses *before* any
//! statement or transform decorator whose first line carries a breakpoint,
//! once per dynamic execution. Decorators run when their qnode's body has
//! finished, topmost first.

mod machine;
mod snapshot;

use std::collections::BTreeSet;
use std::time::Duration;

use thiserror::Error;

use crate::frontend::{self, ast::Ast, has_errors, Diagnostic};
use crate::sim::MAX_QUBITS;
use machine::{Machine, Stop};

pub use snapshot::{
    frame_detail, CallFrame, EventPayload, FrameDetail, FrameId, FrameKind, MeasurementResult, QnodeOutput,
    Snapshot, Status, TraceEvent, TransformedGate,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("the session has already finished")]
    Finished,
    #[error("no frame with id {0}")]
    UnknownFrame(FrameId),
}

/// Guards against runaway programs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExecLimits {
    pub max_events: usize,
    /// Wall-clock cap for one `next` call.
    pub max_wall: Option<Duration>,
    pub max_qubits: usize,
}

impl Default for ExecLimits {
    fn default() -> Self {
        ExecLimits {
            max_events: 1_000_000,
            max_wall: Some(Duration::from_secs(10)),
            max_qubits: MAX_QUBITS,
        }
    }
}

impl ExecLimits {
    /// Tighter wall clock for edit-as-you-type execution.
    pub fn realtime() -> Self {
        ExecLimits {
            max_wall: Some(Duration::from_secs(1)),
            ..ExecLimits::default()
        }
    }
}

/// Stepping debugger over one program run.
pub struct DebugSession {
    machine: Machine,
    unbound: Vec<usize>,
    history: Vec<Snapshot>,
    seed: u64,
    done: bool,
    budget_exceeded: bool,
}

impl DebugSession {
    /// Checks `ast` and positions a session before its first top-level
    /// statement. Nothing runs until [`DebugSession::next`].
    pub fn start(
        ast: &Ast,
        breakpoints: impl IntoIterator<Item = usize>,
        seed: u64,
    ) -> Result<Self, Vec<Diagnostic>> {
        Self::with_limits(ast, breakpoints, seed, ExecLimits::default())
    }

    pub fn with_limits(
        ast: &Ast,
        breakpoints: impl IntoIterator<Item = usize>,
        seed: u64,
        limits: ExecLimits,
    ) -> Result<Self, Vec<Diagnostic>> {
        let diags = frontend::check(ast);
        if has_errors(&diags) {
            return Err(diags);
        }
        let breakpoints: BTreeSet<usize> = breakpoints.into_iter().collect();
        let executable = frontend::executable_lines(ast);
        let unbound = breakpoints.difference(&executable).copied().collect();
        Ok(DebugSession {
            machine: Machine::new(ast, breakpoints, seed, limits),
            unbound,
            history: Vec::new(),
            seed,
            done: false,
            budget_exceeded: false,
        })
    }

    /// Runs to the next breakpoint or to the end of the program.
    pub fn next(&mut self) -> Result<Snapshot, TraceError> {
        if self.done {
            return Err(TraceError::Finished);
        }
        let status = match self.machine.resume() {
            Stop::Paused(line) => Status::Paused { line },
            Stop::Finished => {
                self.done = true;
                Status::Finished
            }
            Stop::Fault(fault) => {
                self.done = true;
                self.budget_exceeded = fault.budget;
                Status::RuntimeError {
                    line: fault.line,
                    message: fault.message,
                }
            }
        };
        let snapshot = Snapshot {
            status,
            frames: self.machine.frames.clone(),
            events: self.machine.events.clone(),
            outputs: self.machine.outputs.clone(),
            unbound_breakpoints: self.unbound.clone(),
        };
        self.history.push(snapshot.clone());
        Ok(snapshot)
    }

    /// Steps until the program finishes or faults, returning every snapshot.
    pub fn run_all(&mut self) -> Vec<Snapshot> {
        let mut out = Vec::new();
        while let Ok(s) = self.next() {
            out.push(s);
        }
        out
    }

    pub fn is_done(&self) -> bool {
        self.done
    }

    pub fn unbound_breakpoints(&self) -> &[usize] {
        &self.unbound
    }

    pub fn history(&self) -> &[Snapshot] {
        &self.history
    }

    pub fn latest(&self) -> Option<&Snapshot> {
        self.history.last()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// True if the run was cut off by [`ExecLimits`].
    pub fn budget_exceeded(&self) -> bool {
        self.budget_exceeded
    }
}

/// Runs a whole program without breakpoints.
pub fn run_to_end(ast: &Ast, seed: u64) -> Result<Snapshot, Vec<Diagnostic>> {
    run_to_end_with_limits(ast, seed, ExecLimits::default())
}

pub fn run_to_end_with_limits(ast: &Ast, seed: u64, limits: ExecLimits) -> Result<Snapshot, Vec<Diagnostic>> {
    let mut session = DebugSession::with_limits(ast, [], seed, limits)?;
    Ok(session.next().expect("fresh session"))
}
