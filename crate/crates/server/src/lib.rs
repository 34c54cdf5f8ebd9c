//! Session server for the QDL debugger.
//!
//! Clients drive debugger sessions over a WebSocket at `/session`, sending
//! one JSON op per message and receiving exactly one JSON event back.
//! Edit-as-you-type clients POST source to `/realtime` instead. The same
//! dispatch is available in-process through [`Registry::handle_text`].
//!
//! Examples: `ws_client`, `realtime_post`, `in_process`.
//!
//! ```
//! use qdbg_server::{Registry, ServerEvent};
//!
//! let reg = Registry::new();
//! let src = "qnode m() on device(wires=1) {\n    h(0);\n    return expval(X(0));\n}\nm();\n";
//! let load = serde_json::json!({"op": "load", "source": src}).to_string();
//! let ServerEvent::Loaded { token, .. } = reg.handle_text(&load) else { panic!() };
//!
//! reg.handle_text(&format!(r#"{{"op":"start","token":"{token}"}}"#));
//! let ev = reg.handle_text(&format!(r#"{{"op":"next","token":"{token}"}}"#));
//! assert!(matches!(ev, ServerEvent::Finished { .. }));
//!
//! let ev = reg.handle_text("{not json");
//! assert!(ev.is_error());
//! ```

pub mod cli;
pub mod http;
pub mod protocol;
pub mod registry;

pub use protocol::{ClientOp, ErrorCode, FrameView, ServerEvent};
pub use registry::{realtime_update, run_headless, Registry};
