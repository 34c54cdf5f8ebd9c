//! Wire format: one JSON object per message, `op`-tagged from the client and
//! `ev`-tagged from the server.

use serde::{Deserialize, Serialize};

use qdbg_core::frontend::Diagnostic;
use qdbg_core::render::CircuitView;
use qdbg_core::trace::{FrameId, MeasurementResult, Snapshot};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClientOp {
    Load {
        source: String,
    },
    Breakpoints {
        token: String,
        lines: Vec<usize>,
    },
    Start {
        token: String,
        #[serde(default)]
        seed: Option<u64>,
    },
    Next {
        token: String,
    },
    Zoom {
        token: String,
        frame: FrameId,
    },
    Detail {
        token: String,
        frame: FrameId,
    },
    Stop {
        token: String,
    },
    Realtime {
        source: String,
        #[serde(default)]
        seed: Option<u64>,
        /// Editor instance, for coalescing stale edits.
        #[serde(default)]
        client: Option<String>,
        /// Increasing edit counter within `client`.
        #[serde(default)]
        edit: Option<u64>,
    },
}

impl ClientOp {
    pub fn name(&self) -> &'static str {
        match self {
            ClientOp::Load { .. } => "load",
            ClientOp::Breakpoints { .. } => "breakpoints",
            ClientOp::Start { .. } => "start",
            ClientOp::Next { .. } => "next",
            ClientOp::Zoom { .. } => "zoom",
            ClientOp::Detail { .. } => "detail",
            ClientOp::Stop { .. } => "stop",
            ClientOp::Realtime { .. } => "realtime",
        }
    }
}

pub const OPS: [&str; 8] = ["load", "breakpoints", "start", "next", "zoom", "detail", "stop", "realtime"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrameView {
    pub frame: FrameId,
    pub circuit: CircuitView,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ev", rename_all = "snake_case")]
pub enum ServerEvent {
    Loaded {
        token: String,
        unbound_breakpoints: Vec<usize>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        warnings: Vec<Diagnostic>,
    },
    Diagnostics {
        items: Vec<Diagnostic>,
    },
    Paused {
        line: usize,
        snapshot: Snapshot,
    },
    Finished {
        snapshot: Snapshot,
        /// Root view per top-level qnode call, real-time replies only.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        views: Option<Vec<FrameView>>,
    },
    View {
        frame: FrameId,
        circuit: CircuitView,
    },
    Detail {
        frame: FrameId,
        args: Vec<(String, f64)>,
        output: Option<Vec<MeasurementResult>>,
    },
    Stopped {
        token: String,
    },
    Error {
        code: ErrorCode,
        message: String,
    },
}

impl ServerEvent {
    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerEvent::Error {
            code,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, ServerEvent::Error { .. })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    MalformedJson,
    InvalidMessage,
    UnknownOp,
    UnknownSession,
    NotStarted,
    SessionFinished,
    SessionRunning,
    UnknownFrame,
    NotReady,
    InvalidFrame,
    TooLarge,
    Superseded,
    Internal,
}
