//! Interactive debugging for QDL quantum programs.
//!
//! The pipeline is [`frontend`] (parse and check) → [`trace`] (execute on the
//! statevector simulator in [`sim`], pausing at breakpoints) → [`render`]
//! (hierarchical circuit views of a snapshot). [`transforms`] holds the
//! rewrite passes a qnode can be decorated with.
//!
//! Runnable examples: `grover`, `breakpoints`, `transforms`, `diagnostics`,
//! `simulator`, `midcircuit`, `circuit_json` (`cargo run --example NAME`).
//!
//! ```
//! use qdbg_core::{frontend, render, trace};
//!
//! let src = "qnode bell() on device(wires=2) {\n    h(0);\n    cnot(0, 1);\n    return expval(Z(0) @ Z(1));\n}\nbell();\n";
//! let (ast, _warnings) = frontend::compile(src).unwrap();
//! let mut session = trace::DebugSession::start(&ast, [3], 7).unwrap();
//!
//! let paused = session.next().unwrap();
//! assert_eq!(paused.paused_line(), Some(3));
//! assert_eq!(paused.events.len(), 1);
//!
//! let done = session.next().unwrap();
//! assert!(done.is_finished());
//! let view = render::build_view(&done, 0).unwrap();
//! assert_eq!(view.columns.len(), 3);
//! ```

pub mod frontend;
pub mod render;
pub mod sim;
pub mod trace;
pub mod transforms;

/// The Grover search program shipped with the crate.
pub const GROVER_QDL: &str = include_str!("../programs/grover.qdl");
