//! Session table and op dispatch.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use dashmap::DashMap;
use parking_lot::Mutex;

use qdbg_core::frontend::{self, ast::Ast, executable_lines};
use qdbg_core::render::{self, RenderError};
use qdbg_core::trace::{self, frame_detail, DebugSession, ExecLimits, FrameKind, Snapshot, Status, TraceError};

use crate::protocol::{ClientOp, ErrorCode, FrameView, ServerEvent, OPS};

/// Messages longer than this are rejected unparsed.
pub const MAX_MESSAGE_BYTES: usize = 1 << 20;

const DEFAULT_SEED: u64 = 0;

struct Entry {
    ast: Ast,
    breakpoints: Vec<usize>,
    session: Option<DebugSession>,
}

impl Entry {
    fn unbound(&self) -> Vec<usize> {
        let lines = executable_lines(&self.ast);
        let mut out: Vec<usize> = self.breakpoints.iter().copied().filter(|l| !lines.contains(l)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn latest(&self) -> Result<&Snapshot, ServerEvent> {
        self.session
            .as_ref()
            .and_then(|s| s.latest())
            .ok_or_else(|| ServerEvent::error(ErrorCode::NotStarted, "no snapshot yet: send start, then next"))
    }
}

/// Live debugger sessions keyed by opaque token.
#[derive(Default)]
pub struct Registry {
    sessions: DashMap<String, Arc<Mutex<Entry>>>,
    /// Newest real-time edit seen per client.
    edits: DashMap<String, u64>,
    limits: Limits,
}

#[derive(Clone, Copy, Debug)]
struct Limits {
    debug: ExecLimits,
    realtime: ExecLimits,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            debug: ExecLimits::default(),
            realtime: ExecLimits::realtime(),
        }
    }
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_limits(debug: ExecLimits, realtime: ExecLimits) -> Self {
        Registry {
            limits: Limits { debug, realtime },
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// Replies to one raw message. Never panics; every input gets exactly
    /// one event.
    pub fn handle_text(&self, text: &str) -> ServerEvent {
        if text.len() > MAX_MESSAGE_BYTES {
            return ServerEvent::error(
                ErrorCode::TooLarge,
                format!("message of {} bytes exceeds the {MAX_MESSAGE_BYTES}-byte limit", text.len()),
            );
        }
        let op = match parse_op(text) {
            Ok(op) => op,
            Err(ev) => return ev,
        };
        self.handle(op)
    }

    pub fn handle(&self, op: ClientOp) -> ServerEvent {
        let name = op.name();
        catch_unwind(AssertUnwindSafe(|| self.dispatch(op)))
            .unwrap_or_else(|_| ServerEvent::error(ErrorCode::Internal, format!("internal error while handling '{name}'")))
    }

    fn dispatch(&self, op: ClientOp) -> ServerEvent {
        match op {
            ClientOp::Load { source } => self.load(&source),
            ClientOp::Breakpoints { token, lines } => self.with_entry(&token, |e| {
                if e.session.as_ref().is_some_and(|s| !s.is_done()) {
                    return ServerEvent::error(
                        ErrorCode::SessionRunning,
                        "breakpoints are fixed once started; stop or finish the session first",
                    );
                }
                if lines.contains(&0) {
                    return ServerEvent::error(ErrorCode::InvalidMessage, "breakpoint lines start at 1");
                }
                e.breakpoints = lines;
                e.session = None;
                ServerEvent::Loaded {
                    token: token.clone(),
                    unbound_breakpoints: e.unbound(),
                    warnings: Vec::new(),
                }
            }),
            ClientOp::Start { token, seed } => {
                let limits = self.limits.debug;
                self.with_entry(&token, |e| {
                    let session = DebugSession::with_limits(
                        &e.ast,
                        e.breakpoints.iter().copied(),
                        seed.unwrap_or(DEFAULT_SEED),
                        limits,
                    );
                    match session {
                        Ok(s) => {
                            let unbound = s.unbound_breakpoints().to_vec();
                            e.session = Some(s);
                            ServerEvent::Loaded {
                                token: token.clone(),
                                unbound_breakpoints: unbound,
                                warnings: Vec::new(),
                            }
                        }
                        Err(items) => ServerEvent::Diagnostics { items },
                    }
                })
            }
            ClientOp::Next { token } => self.with_entry(&token, |e| {
                let Some(session) = e.session.as_mut() else {
                    return ServerEvent::error(ErrorCode::NotStarted, "session not started: send start first");
                };
                match session.next() {
                    Ok(snapshot) => match snapshot.status {
                        Status::Paused { line } => ServerEvent::Paused { line, snapshot },
                        Status::Finished | Status::RuntimeError { .. } => ServerEvent::Finished { snapshot, views: None },
                    },
                    Err(TraceError::Finished) => {
                        ServerEvent::error(ErrorCode::SessionFinished, "the session has finished; start it again to rerun")
                    }
                    Err(other) => ServerEvent::error(ErrorCode::Internal, other.to_string()),
                }
            }),
            ClientOp::Zoom { token, frame } => self.with_entry(&token, |e| match e.latest() {
                Ok(snap) => match render::view_for(snap, frame) {
                    Ok(circuit) => ServerEvent::View { frame, circuit },
                    Err(err) => render_error(err),
                },
                Err(ev) => ev,
            }),
            ClientOp::Detail { token, frame } => self.with_entry(&token, |e| match e.latest() {
                Ok(snap) => match frame_detail(snap, frame) {
                    Ok(d) => ServerEvent::Detail {
                        frame,
                        args: d.args,
                        output: d.output,
                    },
                    Err(err) => render_error(err.into()),
                },
                Err(ev) => ev,
            }),
            ClientOp::Stop { token } => match self.sessions.remove(&token) {
                Some(_) => ServerEvent::Stopped { token },
                None => unknown_session(&token),
            },
            ClientOp::Realtime {
                source,
                seed,
                client,
                edit,
            } => self.realtime(&source, seed, client, edit),
        }
    }

    fn load(&self, source: &str) -> ServerEvent {
        match frontend::compile(source) {
            Ok((ast, warnings)) => {
                let token = uuid::Uuid::new_v4().simple().to_string();
                let entry = Entry {
                    ast,
                    breakpoints: Vec::new(),
                    session: None,
                };
                self.sessions.insert(token.clone(), Arc::new(Mutex::new(entry)));
                ServerEvent::Loaded {
                    token,
                    unbound_breakpoints: Vec::new(),
                    warnings,
                }
            }
            Err(items) => ServerEvent::Diagnostics { items },
        }
    }

    fn with_entry(&self, token: &str, f: impl FnOnce(&mut Entry) -> ServerEvent) -> ServerEvent {
        // clone the handle so the map shard is not held while the op runs
        let Some(entry) = self.sessions.get(token).map(|e| Arc::clone(e.value())) else {
            return unknown_session(token);
        };
        let mut guard = entry.lock();
        f(&mut guard)
    }

    fn realtime(&self, source: &str, seed: Option<u64>, client: Option<String>, edit: Option<u64>) -> ServerEvent {
        let stale = |this: &Self| match (&client, edit) {
            (Some(c), Some(n)) => this.edits.get(c).is_some_and(|latest| *latest > n),
            _ => false,
        };
        if let (Some(c), Some(n)) = (&client, edit) {
            let mut latest = self.edits.entry(c.clone()).or_insert(n);
            if *latest > n {
                return superseded(n);
            }
            *latest = n;
        }
        let reply = realtime_update_with(source, seed.unwrap_or(DEFAULT_SEED), self.limits.realtime);
        if stale(self) {
            return superseded(edit.unwrap_or_default());
        }
        reply
    }
}

fn superseded(edit: u64) -> ServerEvent {
    ServerEvent::error(ErrorCode::Superseded, format!("edit {edit} was superseded by a newer edit"))
}

fn unknown_session(token: &str) -> ServerEvent {
    ServerEvent::error(ErrorCode::UnknownSession, format!("no session with token '{token}'"))
}

fn render_error(err: RenderError) -> ServerEvent {
    let code = match &err {
        RenderError::Lookup(_) => ErrorCode::UnknownFrame,
        RenderError::NotReady(_) => ErrorCode::NotReady,
        RenderError::TransformFrame(_) | RenderError::NotTransform(_) => ErrorCode::InvalidFrame,
    };
    ServerEvent::error(code, err.to_string())
}

fn parse_op(text: &str) -> Result<ClientOp, ServerEvent> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| ServerEvent::error(ErrorCode::MalformedJson, format!("malformed JSON: {e}")))?;
    let Some(obj) = value.as_object() else {
        return Err(ServerEvent::error(ErrorCode::InvalidMessage, "message must be a JSON object"));
    };
    match obj.get("op") {
        None => return Err(ServerEvent::error(ErrorCode::InvalidMessage, "message has no 'op' field")),
        Some(serde_json::Value::String(op)) if !OPS.contains(&op.as_str()) => {
            return Err(ServerEvent::error(
                ErrorCode::UnknownOp,
                format!("unknown op '{op}' (expected one of: {})", OPS.join(", ")),
            ))
        }
        Some(serde_json::Value::String(_)) => {}
        Some(_) => return Err(ServerEvent::error(ErrorCode::InvalidMessage, "'op' must be a string")),
    }
    serde_json::from_value(value).map_err(|e| ServerEvent::error(ErrorCode::InvalidMessage, e.to_string()))
}

/// Checks and runs `source` in one go, for edit-as-you-type clients.
pub fn realtime_update(source: &str, seed: u64) -> ServerEvent {
    realtime_update_with(source, seed, ExecLimits::realtime())
}

fn realtime_update_with(source: &str, seed: u64, limits: ExecLimits) -> ServerEvent {
    let ast = match frontend::compile(source) {
        Ok((ast, _)) => ast,
        Err(items) => return ServerEvent::Diagnostics { items },
    };
    let mut session = match DebugSession::with_limits(&ast, [], seed, limits) {
        Ok(s) => s,
        Err(items) => return ServerEvent::Diagnostics { items },
    };
    let snapshot = session.next().expect("fresh session");
    if session.budget_exceeded() {
        return ServerEvent::error(ErrorCode::TooLarge, "program too large for real-time mode");
    }
    let views = snapshot
        .roots()
        .filter(|f| f.kind == FrameKind::Qnode)
        .filter_map(|f| {
            render::build_view(&snapshot, f.id)
                .ok()
                .map(|circuit| FrameView { frame: f.id, circuit })
        })
        .collect();
    ServerEvent::Finished {
        snapshot,
        views: Some(views),
    }
}

/// Headless equivalent of a debugger run with no breakpoints.
pub fn run_headless(source: &str, seed: u64) -> Result<Snapshot, Vec<qdbg_core::frontend::Diagnostic>> {
    let (ast, _) = frontend::compile(source)?;
    trace::run_to_end(&ast, seed)
}
