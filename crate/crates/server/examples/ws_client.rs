//! Starts the server on an ephemeral port and drives a debugger session
//! over the `/session` WebSocket.

use std::sync::Arc;

use futures::{SinkExt, StreamExt};
use qdbg_server::{http, Registry};
use serde_json::{json, Value};
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(http::serve_on(listener, Arc::new(Registry::new())));

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/session")).await.unwrap();
    let mut call = async |msg: Value| -> Value {
        ws.send(Message::text(msg.to_string())).await.unwrap();
        let reply = ws.next().await.unwrap().unwrap();
        serde_json::from_str(reply.to_text().unwrap()).unwrap()
    };

    let loaded = call(json!({"op": "load", "source": qdbg_core::GROVER_QDL})).await;
    let token = loaded["token"].as_str().unwrap().to_string();
    println!("loaded, token {token}");
    let bps = call(json!({"op": "breakpoints", "token": token, "lines": [24, 28, 99]})).await;
    println!("unbound breakpoints: {}", bps["unbound_breakpoints"]);
    call(json!({"op": "start", "token": token, "seed": 0})).await;

    loop {
        let ev = call(json!({"op": "next", "token": token})).await;
        let snap = &ev["snapshot"];
        println!("{} line={} events={}", ev["ev"], ev["line"], snap["events"].as_array().unwrap().len());
        if ev["ev"] != "paused" {
            println!("outputs: {}", snap["outputs"]);
            break;
        }
    }

    let view = call(json!({"op": "zoom", "token": token, "frame": 2})).await;
    println!("zoom frame 2: {} columns", view["circuit"]["columns"].as_array().unwrap().len());
    let detail = call(json!({"op": "detail", "token": token, "frame": 2})).await;
    println!("detail frame 2: args {}", detail["args"]);
    let err = call(json!({"op": "next", "token": token})).await;
    println!("next after finish: {err}");
    println!("{}", call(json!({"op": "stop", "token": token})).await);
}
