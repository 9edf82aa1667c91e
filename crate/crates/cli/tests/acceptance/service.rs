use std::net::SocketAddr;
use std::time::Duration;

use futures_util::{SinkExt, StreamExt};
use serde_json::{json, Value};
use talkhead_service::{check_turn_grammar, AppState, MessageType, ServiceConfig, WsMessage};
use tokio_tungstenite::tungstenite::Message;

use crate::{ensure, Outcome};

const TOKEN: &str = "acceptance";
const LIBRARY: &str = "The library opens at 8am on weekdays and closes at 10pm. \
    Members can borrow ten books at a time.\n\nThe reading room on the second floor is quiet.";
const MUSEUM: &str = "The museum shows dinosaur fossils and ancient pottery. Guided tours start every hour.";

/// Starts the service on an ephemeral port in a background runtime.
fn start() -> Result<SocketAddr, String> {
    let config = ServiceConfig {
        token: TOKEN.to_owned(),
        clock_speed: 50.0,
        ..ServiceConfig::default()
    };
    let state = AppState::new(config).map_err(|e| e.to_string())?;
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().expect("runtime");
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.expect("bind");
            tx.send(listener.local_addr().expect("addr")).expect("report addr");
            let _ = talkhead_service::serve(listener, state).await;
        });
    });
    rx.recv_timeout(Duration::from_secs(10)).map_err(|e| e.to_string())
}

fn post(addr: SocketAddr, path: &str, body: Value) -> Result<(u16, Value), String> {
    let resp = reqwest::blocking::Client::new()
        .post(format!("http://{addr}{path}"))
        .bearer_auth(TOKEN)
        .json(&body)
        .send()
        .map_err(|e| e.to_string())?;
    let status = resp.status().as_u16();
    Ok((status, resp.json().unwrap_or(Value::Null)))
}

fn ingest(addr: SocketAddr, domain: &str, doc: &str) -> Result<Value, String> {
    let (status, body) = post(addr, "/v1/corpus/ingest", json!({ "domain": domain, "documents": [doc] }))?;
    ensure!(status == 200, "ingest {domain}: HTTP {status} {body}");
    Ok(body)
}

fn stream_turn(addr: SocketAddr, session: &str, transcript: &str) -> Result<Vec<WsMessage>, String> {
    let rt = tokio::runtime::Builder::new_current_thread()
        .enable_all()
        .build()
        .map_err(|e| e.to_string())?;
    rt.block_on(async {
        let url = format!("ws://{addr}/v1/stream?session={session}&token={TOKEN}");
        let (mut ws, _) = tokio_tungstenite::connect_async(url).await.map_err(|e| e.to_string())?;
        let frame = json!({ "type": "transcript", "text": transcript }).to_string();
        ws.send(Message::Text(frame.into())).await.map_err(|e| e.to_string())?;
        let mut turn = Vec::new();
        loop {
            let next = tokio::time::timeout(Duration::from_secs(30), ws.next())
                .await
                .map_err(|_| "timed out waiting for the turn".to_owned())?;
            let Some(frame) = next else {
                return Err("stream closed mid-turn".to_owned());
            };
            if let Message::Text(t) = frame.map_err(|e| e.to_string())? {
                let m: WsMessage = serde_json::from_str(t.as_str()).map_err(|e| e.to_string())?;
                let done = m.kind == MessageType::TurnEnd;
                turn.push(m);
                if done {
                    let _ = ws.close(None).await;
                    return Ok(turn);
                }
            }
        }
    })
}

fn new_session(addr: SocketAddr) -> Result<String, String> {
    let (status, body) = post(addr, "/v1/session", Value::Null)?;
    ensure!(status == 200, "session: HTTP {status}");
    body["session_id"].as_str().map(str::to_owned).ok_or_else(|| "no session id".to_owned())
}

/// A full wake-phrase turn recorded from a live service.
pub fn recorded_turn() -> Result<Vec<WsMessage>, String> {
    let addr = start()?;
    ingest(addr, "library", LIBRARY)?;
    ingest(addr, "museum", MUSEUM)?;
    let session = new_session(addr)?;
    stream_turn(addr, &session, "hi reco when does the library open")
}

pub fn conformance() -> Outcome {
    let addr = start()?;
    let first = ingest(addr, "library", LIBRARY)?;
    let second = ingest(addr, "library", LIBRARY)?;
    ensure!(first["chunks"] == second["chunks"], "chunk counts changed: {first} then {second}");
    ensure!(second["chunks_added"] == 0 && second["duplicate_documents"] == 1, "re-ingest added data: {second}");
    ingest(addr, "museum", MUSEUM)?;

    let session = new_session(addr)?;
    let turn = stream_turn(addr, &session, "hi reco when does the library open")?;
    let kinds: Vec<MessageType> = turn.iter().map(|m| m.kind).collect();
    check_turn_grammar(&kinds).map_err(|e| format!("{e:?} in {kinds:?}"))?;
    ensure!(turn.windows(2).all(|w| w[1].seq > w[0].seq), "seq not increasing");
    let end = turn.last().ok_or("empty turn")?;
    ensure!(end.payload["aborted"] == false, "turn aborted: {}", end.payload);
    let audio = kinds.iter().filter(|k| **k == MessageType::AudioSegment).count();
    ensure!(audio >= 1, "no audio");
    Ok(format!("{} messages, {audio} audio segments, grammar ok; re-ingest unchanged", turn.len()))
}
