//! Headless one-shot runs for `qdbg run`.

use std::fmt::Write as _;
use std::path::Path;

use qdbg_core::frontend;
use qdbg_core::render;
use qdbg_core::trace::{DebugSession, FrameId, Snapshot, Status};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROGRAM_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub breakpoints: Vec<usize>,
    pub seed: u64,
    pub frame: Option<FrameId>,
    pub json: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run_file(path: &Path, opts: &RunOptions) -> RunOutput {
    match std::fs::read_to_string(path) {
        Ok(source) => run_source(&source, opts),
        Err(e) => RunOutput {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: cannot read {}: {e}\n", path.display()),
        },
    }
}

/// With `json`, prints one document per line: a Snapshot per pause, the
/// final Snapshot, then the selected frame's view if any. Diagnostics print
/// as `{"diagnostics":[...]}`.
pub fn run_source(source: &str, opts: &RunOptions) -> RunOutput {
    let mut out = RunOutput {
        code: EXIT_OK,
        stdout: String::new(),
        stderr: String::new(),
    };
    let ast = match frontend::compile(source) {
        Ok((ast, warnings)) => {
            for w in warnings {
                let _ = writeln!(out.stderr, "{w}");
            }
            ast
        }
        Err(diags) => {
            out.code = EXIT_PROGRAM_ERROR;
            if opts.json {
                let doc = serde_json::json!({ "diagnostics": diags });
                let _ = writeln!(out.stdout, "{doc}");
            } else {
                for d in diags {
                    let _ = writeln!(out.stdout, "{d}");
                }
            }
            return out;
        }
    };
    let mut session =
        DebugSession::start(&ast, opts.breakpoints.iter().copied(), opts.seed).expect("compiled programs check clean");
    for line in session.unbound_breakpoints() {
        let _ = writeln!(out.stderr, "warning: breakpoint on line {line} is not on an executable line");
    }
    let snapshots = session.run_all();
    for snap in &snapshots {
        if opts.json {
            let _ = writeln!(out.stdout, "{}", serde_json::to_string(snap).expect("serializable"));
        } else {
            describe(snap, &mut out.stdout);
        }
    }
    let last = snapshots.last().expect("a session emits at least one snapshot");
    if let Status::RuntimeError { .. } = last.status {
        out.code = EXIT_PROGRAM_ERROR;
    }
    if let Some(frame) = opts.frame {
        match render::view_for(last, frame) {
            Ok(view) if opts.json => {
                let _ = writeln!(out.stdout, "{}", serde_json::to_string(&view).expect("serializable"));
            }
            Ok(view) => {
                let _ = write!(out.stdout, "\nframe {frame}:\n{}", view.to_text());
            }
            Err(e) => {
                out.code = EXIT_USAGE;
                let _ = writeln!(out.stderr, "error: --frame {frame}: {e}");
            }
        }
    }
    out
}

fn describe(snap: &Snapshot, out: &mut String) {
    match &snap.status {
        Status::Paused { line } => {
            let _ = writeln!(out, "paused before line {line} ({} events)", snap.events.len());
        }
        Status::Finished => {
            let _ = writeln!(out, "finished ({} events)", snap.events.len());
        }
        Status::RuntimeError { line, message } => {
            let _ = writeln!(out, "runtime error at line {line}: {message}");
        }
    }
    for l in snap.tree_text().lines() {
        let _ = writeln!(out, "  {l}");
    }
    if snap.is_finished() {
        for root in snap.roots() {
            if let Ok(view) = render::build_view(snap, root.id) {
                let _ = write!(out, "\n{} #{}:\n{}", root.name, root.id, view.to_text());
            }
        }
    }
}
