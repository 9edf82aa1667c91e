#![allow(dead_code)]

use std::net::SocketAddr;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use futures_util::{SinkExt, StreamExt};
use http_body_util::BodyExt;
use serde_json::Value;
use talkhead_service::{AppState, ServiceConfig, WsMessage};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};
use tower::ServiceExt;

pub const TOKEN: &str = "test-token";

pub type Ws = WebSocketStream<MaybeTlsStream<TcpStream>>;

pub fn config() -> ServiceConfig {
    ServiceConfig {
        token: TOKEN.to_owned(),
        clock_speed: 50.0,
        ..ServiceConfig::default()
    }
}

pub const LIBRARY_DOC: &str = "The library opens at 8am on weekdays. Members can borrow ten books at a time.\n\nThe reading room is quiet and has free wifi.";
pub const MUSEUM_DOC: &str = "The museum shows dinosaur fossils and ancient pottery. Guided tours start every hour.";

pub fn state_with_corpus() -> AppState {
    let app = AppState::new(config()).unwrap();
    app.knowledge().ingest("library", &[LIBRARY_DOC.to_owned()]).unwrap();
    app.knowledge().ingest("museum", &[MUSEUM_DOC.to_owned()]).unwrap();
    app
}

pub async fn request(app: &AppState, method: &str, uri: &str, token: Option<&str>, body: &str) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(t) = token {
        req = req.header("authorization", format!("Bearer {t}"));
    }
    let req = req
        .header("content-type", "application/json")
        .body(Body::from(body.to_owned()))
        .unwrap();
    let resp = talkhead_service::router(app.clone()).oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let json = if bytes.is_empty() {
        Value::Null
    } else {
        serde_json::from_slice(&bytes).unwrap_or(Value::Null)
    };
    (status, json)
}

pub async fn spawn(app: AppState) -> SocketAddr {
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(talkhead_service::serve(listener, app));
    addr
}

pub async fn new_session(addr: SocketAddr) -> String {
    // Plain HTTP/1.1 POST without pulling in an HTTP client.
    let mut stream = TcpStream::connect(addr).await.unwrap();
    let req = format!(
        "POST /v1/session HTTP/1.1\r\nHost: {addr}\r\nAuthorization: Bearer {TOKEN}\r\nContent-Length: 0\r\nConnection: close\r\n\r\n"
    );
    tokio::io::AsyncWriteExt::write_all(&mut stream, req.as_bytes()).await.unwrap();
    let mut buf = Vec::new();
    tokio::io::AsyncReadExt::read_to_end(&mut stream, &mut buf).await.unwrap();
    let text = String::from_utf8(buf).unwrap();
    let body = text.split("\r\n\r\n").nth(1).expect("response has a body");
    let v: Value = serde_json::from_str(body.trim()).unwrap();
    v["session_id"].as_str().unwrap().to_owned()
}

pub async fn connect(addr: SocketAddr, session: &str) -> Ws {
    let url = format!("ws://{addr}/v1/stream?session={session}&token={TOKEN}");
    tokio_tungstenite::connect_async(url).await.unwrap().0
}

pub async fn say(ws: &mut Ws, text: &str) {
    let frame = serde_json::json!({ "type": "transcript", "text": text }).to_string();
    ws.send(Message::Text(frame.into())).await.unwrap();
}

pub async fn next_message(ws: &mut Ws) -> WsMessage {
    loop {
        let frame = tokio::time::timeout(Duration::from_secs(20), ws.next())
            .await
            .expect("timed out waiting for a message")
            .expect("stream ended")
            .expect("socket error");
        if let Message::Text(t) = frame {
            return serde_json::from_str(t.as_str()).unwrap();
        }
    }
}

/// Reads messages up to and including the next turn_end.
pub async fn read_turn(ws: &mut Ws) -> Vec<WsMessage> {
    let mut out = Vec::new();
    loop {
        let m = next_message(ws).await;
        let done = m.kind == talkhead_service::MessageType::TurnEnd;
        out.push(m);
        if done {
            return out;
        }
    }
}
