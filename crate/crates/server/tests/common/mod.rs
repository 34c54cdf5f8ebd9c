//! Message generators shared by the protocol tests and the acceptance gate.
#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qdbg_server::{ErrorCode, Registry, ServerEvent};

pub const BELL: &str = "qnode bell() on device(wires=2) {\n    h(0);\n    cnot(0, 1);\n    return expval(Z(0) @ Z(1));\n}\nbell();\n";

pub fn send(reg: &Registry, msg: Value) -> ServerEvent {
    reg.handle_text(&msg.to_string())
}

pub fn load(reg: &Registry, source: &str) -> String {
    match send(reg, json!({"op": "load", "source": source})) {
        ServerEvent::Loaded { token, .. } => token,
        other => panic!("load failed: {other:?}"),
    }
}

pub fn error_code(ev: &ServerEvent) -> Option<ErrorCode> {
    match ev {
        ServerEvent::Error { code, .. } => Some(*code),
        _ => None,
    }
}

/// Produces messages that must each be answered with an error event:
/// garbage bytes, broken JSON, ill-typed ops, and ops sent out of sequence
/// against live sessions.
pub struct Fuzzer {
    rng: ChaCha8Rng,
    /// Loaded but never started.
    fresh: String,
    /// Started and driven to completion.
    finished: String,
    /// Started, paused at a breakpoint.
    running: String,
    stopped: String,
}

impl Fuzzer {
    pub fn new(reg: &Registry, seed: u64) -> Self {
        let fresh = load(reg, BELL);
        let finished = load(reg, BELL);
        send(reg, json!({"op": "start", "token": finished}));
        assert!(matches!(send(reg, json!({"op": "next", "token": finished})), ServerEvent::Finished { .. }));
        let running = load(reg, BELL);
        send(reg, json!({"op": "breakpoints", "token": running, "lines": [3]}));
        send(reg, json!({"op": "start", "token": running}));
        assert!(matches!(send(reg, json!({"op": "next", "token": running})), ServerEvent::Paused { .. }));
        let stopped = load(reg, BELL);
        send(reg, json!({"op": "stop", "token": stopped}));
        Fuzzer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            fresh,
            finished,
            running,
            stopped,
        }
    }

    fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    fn junk_value(&mut self) -> Value {
        match self.below(6) {
            0 => Value::Null,
            1 => json!(self.rng.next_u64() % 7 == 0),
            2 => json!(-(self.below(1000) as i64)),
            3 => json!(1.5),
            4 => json!([1, "two", null]),
            _ => json!({"nested": {}}),
        }
    }

    pub fn message(&mut self) -> String {
        let ops = ["load", "breakpoints", "start", "next", "zoom", "detail", "stop", "realtime"];
        match self.below(10) {
            0 => {
                let mut bytes = vec![0u8; self.below(64) as usize];
                self.rng.fill_bytes(&mut bytes);
                String::from_utf8_lossy(&bytes).into_owned()
            }
            1 => {
                let full = json!({"op": "load", "source": BELL}).to_string();
                let cut = self.below(full.len() as u64 - 1) as usize;
                full.chars().take(cut).collect()
            }
            2 => {
                let v = match self.below(4) {
                    0 => json!([{"op": "next"}]),
                    1 => json!("next"),
                    2 => json!(42),
                    _ => Value::Null,
                };
                v.to_string()
            }
            3 => {
                let v = match self.below(3) {
                    0 => json!({"token": self.fresh}),
                    1 => json!({"op": self.junk_value(), "token": self.fresh}),
                    _ => json!({"op": format!("op{}", self.below(100)), "token": self.fresh}),
                };
                v.to_string()
            }
            4 => {
                // known op, wrong or missing fields
                let op = ops[self.below(ops.len() as u64) as usize];
                let mut obj = serde_json::Map::new();
                obj.insert("op".into(), op.into());
                match self.below(3) {
                    0 => {}
                    1 => {
                        for key in ["source", "token", "lines", "seed", "frame"] {
                            obj.insert(key.into(), self.junk_value());
                        }
                    }
                    _ => {
                        obj.insert("token".into(), self.fresh.clone().into());
                        obj.insert("source".into(), BELL.into());
                        obj.insert("bogus".into(), true.into());
                    }
                }
                Value::Object(obj).to_string()
            }
            5 => {
                let op = ["breakpoints", "start", "next", "zoom", "detail", "stop"][self.below(6) as usize];
                let token = if self.below(2) == 0 {
                    self.stopped.clone()
                } else {
                    format!("{:032x}", self.rng.next_u64())
                };
                json!({"op": op, "token": token, "lines": [], "frame": 0}).to_string()
            }
            6 => {
                let op = ["next", "zoom", "detail"][self.below(3) as usize];
                json!({"op": op, "token": self.fresh, "frame": 0}).to_string()
            }
            7 => json!({"op": "next", "token": self.finished}).to_string(),
            8 => {
                let v = match self.below(3) {
                    0 => json!({"op": "breakpoints", "token": self.running, "lines": [4]}),
                    1 => json!({"op": "zoom", "token": self.running, "frame": 1000 + self.below(1000)}),
                    _ => json!({"op": "detail", "token": self.finished, "frame": 1000 + self.below(1000)}),
                };
                v.to_string()
            }
            _ => {
                if self.below(50) == 0 {
                    format!("{{\"op\":\"load\",\"source\":\"{}\"}}", "x".repeat(qdbg_server::registry::MAX_MESSAGE_BYTES))
                } else {
                    json!({"op": "breakpoints", "token": self.fresh, "lines": [0, 2]}).to_string()
                }
            }
        }
    }
}

/// Sends `count` fuzz messages; returns a description of the first reply
/// that is not a non-internal error event.
pub fn fuzz(reg: &Registry, seed: u64, count: usize) -> Result<(), String> {
    let mut f = Fuzzer::new(reg, seed);
    for i in 0..count {
        let msg = f.message();
        let ev = reg.handle_text(&msg);
        match error_code(&ev) {
            Some(ErrorCode::Internal) | None => {
                let shown: String = msg.chars().take(200).collect();
                return Err(format!("message {i} {shown:?} got {}", ev.to_json().chars().take(200).collect::<String>()));
            }
            Some(_) => {}
        }
    }
    Ok(())
}
