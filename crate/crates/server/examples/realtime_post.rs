//! Posts successive edits of a program to `/realtime`, as an editor would.

use std::sync::Arc;

use qdbg_server::{http, Registry};
use serde_json::{json, Value};

#[tokio::main]
async fn main() {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(http::serve_on(listener, Arc::new(Registry::new())));
    let client = reqwest::Client::new();
    let url = format!("http://{addr}/realtime");

    let edits = [
        "qnode m(theta) on device(wires=1) {\n    rx(",
        "qnode m(theta) on device(wires=1) {\n    rx(theta, 0);\n    return expval(Z(0));\n}\nm(0.5);\n",
        "qnode m(theta) on device(wires=1) {\n    rx(theta, 0);\n    return expval(Z(0));\n}\nm(2.5);\n",
    ];
    for (n, source) in edits.iter().enumerate() {
        let body = json!({"source": source, "client": "editor-1", "edit": n});
        let text = client.post(&url).body(body.to_string()).send().await.unwrap().text().await.unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        match v["ev"].as_str() {
            Some("diagnostics") => println!("edit {n}: {}", v["items"][0]["message"]),
            Some("finished") => println!(
                "edit {n}: <Z> = {}, view with {} columns",
                v["snapshot"]["outputs"][0]["values"][0]["value"],
                v["views"][0]["circuit"]["columns"].as_array().unwrap().len()
            ),
            _ => println!("edit {n}: {v}"),
        }
    }

    // an edit older than the newest one seen is discarded
    let stale = json!({"source": edits[1], "client": "editor-1", "edit": 0});
    let text = client.post(&url).body(stale.to_string()).send().await.unwrap().text().await.unwrap();
    println!("stale edit: {text}");
}
