//! WebSocket `/session` and HTTP `POST /realtime` endpoints.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use tokio::net::TcpListener;

use crate::protocol::{ErrorCode, ServerEvent};
use crate::registry::Registry;

pub fn router(registry: Arc<Registry>) -> Router {
    Router::new()
        .route("/session", get(session))
        .route("/realtime", post(realtime))
        .route("/health", get(|| async { "ok" }))
        .with_state(registry)
}

/// Binds `addr` and serves until the process exits.
pub async fn serve(addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    serve_on(listener, Arc::new(Registry::new())).await
}

pub async fn serve_on(listener: TcpListener, registry: Arc<Registry>) -> std::io::Result<()> {
    axum::serve(listener, router(registry)).await
}

async fn session(ws: WebSocketUpgrade, State(registry): State<Arc<Registry>>) -> Response {
    ws.max_message_size(crate::registry::MAX_MESSAGE_BYTES * 2)
        .on_upgrade(move |socket| connection(socket, registry))
}

async fn connection(mut socket: WebSocket, registry: Arc<Registry>) {
    while let Some(msg) = socket.recv().await {
        let text = match msg {
            Ok(Message::Text(t)) => t.as_str().to_owned(),
            Ok(Message::Binary(b)) => match String::from_utf8(b.to_vec()) {
                Ok(t) => t,
                Err(_) => {
                    let ev = ServerEvent::error(ErrorCode::MalformedJson, "binary message is not UTF-8");
                    if socket.send(Message::Text(ev.to_json().into())).await.is_err() {
                        return;
                    }
                    continue;
                }
            },
            Ok(Message::Close(_)) | Err(_) => return,
            Ok(_) => continue,
        };
        let reply = dispatch(&registry, text).await;
        if socket.send(Message::Text(reply.to_json().into())).await.is_err() {
            return;
        }
    }
}

async fn realtime(State(registry): State<Arc<Registry>>, body: Bytes) -> Response {
    let text = match String::from_utf8(body.to_vec()) {
        Ok(t) => t,
        Err(_) => return json(ServerEvent::error(ErrorCode::MalformedJson, "body is not UTF-8")),
    };
    // the body is a realtime op without the tag
    let text = match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(serde_json::Value::Object(mut obj)) => {
            obj.insert("op".into(), "realtime".into());
            serde_json::Value::Object(obj).to_string()
        }
        _ => text,
    };
    json(dispatch(&registry, text).await)
}

/// Runs an op off the async workers; execution can take up to the wall cap.
async fn dispatch(registry: &Arc<Registry>, text: String) -> ServerEvent {
    let registry = Arc::clone(registry);
    tokio::task::spawn_blocking(move || registry.handle_text(&text))
        .await
        .unwrap_or_else(|_| ServerEvent::error(ErrorCode::Internal, "handler task failed"))
}

fn json(ev: ServerEvent) -> Response {
    ([(axum::http::header::CONTENT_TYPE, "application/json")], ev.to_json()).into_response()
}
