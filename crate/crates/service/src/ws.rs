use std::sync::atomic::Ordering;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Query, State};
use axum::http::StatusCode;
use axum::response::Response;
use futures_util::{SinkExt, StreamExt};
use serde::Deserialize;
use serde_json::{json, Value};
use talkhead_core::pipeline::{run_turn, PipelineError, PipelineEvent, TurnSink};
use talkhead_core::speech::GateDecision;
use talkhead_core::Role;
use tokio::sync::mpsc;

use crate::messages::{event_payload, parse_client_message, ClientMessage, MessageType, WsMessage};
use crate::rest::error;
use crate::state::{AppState, Session};

#[derive(Deserialize)]
pub(crate) struct StreamParams {
    session: String,
}

pub(crate) async fn stream(
    State(app): State<AppState>,
    Query(params): Query<StreamParams>,
    upgrade: WebSocketUpgrade,
) -> Response {
    let Some(session) = app.session(&params.session) else {
        return error(StatusCode::NOT_FOUND, format!("unknown session {:?}", params.session));
    };
    if session.connected.swap(true, Ordering::SeqCst) {
        return error(StatusCode::CONFLICT, "session already has an open stream");
    }
    upgrade.on_upgrade(move |socket| run_session(app, session, socket))
}

/// Numbers and queues outgoing messages for one session.
struct Outbox {
    session: Arc<Session>,
    tx: mpsc::UnboundedSender<WsMessage>,
}

impl Outbox {
    fn send(&self, kind: MessageType, payload: Value) {
        let seq = self.session.seq.fetch_add(1, Ordering::SeqCst) + 1;
        // A closed socket only means nobody is listening any more.
        let _ = self.tx.send(WsMessage { kind, seq, payload });
    }
}

impl TurnSink for Outbox {
    fn emit(&self, event: PipelineEvent) {
        let (kind, payload) = event_payload(&event);
        self.send(kind, payload);
    }
}

async fn run_session(app: AppState, session: Arc<Session>, socket: WebSocket) {
    let (mut sink, mut source) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel::<WsMessage>();
    let writer = tokio::spawn(async move {
        while let Some(msg) = rx.recv().await {
            let text = serde_json::to_string(&msg).expect("messages are serializable");
            if sink.send(Message::Text(text.into())).await.is_err() {
                break;
            }
        }
        let _ = sink.close().await;
    });
    let outbox = Outbox {
        session: session.clone(),
        tx,
    };
    tracing::info!(session = %session.id, "stream opened");

    while let Some(frame) = source.next().await {
        match frame {
            Ok(Message::Text(text)) => match parse_client_message(text.as_str()) {
                Ok(ClientMessage::Transcript(t)) => handle_transcript(&app, &session, &outbox, &t).await,
                Err(e) => outbox.send(MessageType::Error, json!({ "message": e })),
            },
            Ok(Message::Binary(_)) => outbox.send(
                MessageType::Error,
                json!({ "message": "binary frames are not supported" }),
            ),
            Ok(Message::Close(_)) | Err(_) => break,
            Ok(_) => {}
        }
    }

    drop(outbox);
    let _ = writer.await;
    session.connected.store(false, Ordering::SeqCst);
    tracing::info!(session = %session.id, "stream closed");
}

async fn handle_transcript(app: &AppState, session: &Session, outbox: &Outbox, text: &str) {
    let ports = &app.inner.ports;
    let clock = ports.clock.as_ref();
    let mut state = session.state.lock().await;
    let query = match state.gate.feed(text, clock.now_ms()) {
        GateDecision::Query(q) => q,
        GateDecision::Ignored | GateDecision::AwaitingQuery => return,
    };
    let turn_id = state.next_turn;
    state.next_turn += 1;
    let accepted_ms = clock.now_ms();
    let history = state.log.turns().to_vec();
    match run_turn(&session.id, turn_id, &query, &history, &app.config().pipeline, ports, outbox).await {
        Ok(plan) => {
            state.log.push(Role::User, &query, accepted_ms);
            state.log.push(Role::Assistant, &plan.answer_text, clock.now_ms());
            tracing::info!(
                session = %session.id,
                turn = turn_id,
                ttfa_ms = plan.ttfa_ms,
                segments = plan.segments.len(),
                stalls = plan.stalls.len(),
                "turn complete"
            );
        }
        Err(PipelineError::TurnAborted { reason, .. }) => {
            tracing::warn!(session = %session.id, turn = turn_id, %reason, "turn aborted");
        }
        Err(e @ PipelineError::Config(_)) => {
            outbox.send(MessageType::Error, json!({ "message": e.to_string() }));
            outbox.send(
                MessageType::TurnEnd,
                json!({ "turn_id": turn_id, "ttfa_ms": null, "aborted": true }),
            );
        }
    }
    state.gate.turn_completed(clock.now_ms());
}
