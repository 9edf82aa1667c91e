//! WebSocket wire format.
//!
//! Every frame is one JSON object `{"type", "seq", "payload"}`. `seq` is a
//! per-session counter that strictly increases across reconnects.

use base64::Engine as _;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use talkhead_core::pipeline::PipelineEvent;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageType {
    Transcript,
    ResponseDelta,
    AudioSegment,
    ExpressionFrames,
    MotionSelected,
    PlaybackSync,
    RetrievalDebug,
    TurnEnd,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WsMessage {
    #[serde(rename = "type")]
    pub kind: MessageType,
    pub seq: u64,
    pub payload: Value,
}

/// Wire payload for a pipeline event.
pub fn event_payload(event: &PipelineEvent) -> (MessageType, Value) {
    match event {
        PipelineEvent::RetrievalDebug { routed_domain, results } => (
            MessageType::RetrievalDebug,
            json!({ "routed_domain": routed_domain, "results": results }),
        ),
        PipelineEvent::ResponseDelta { text } => (MessageType::ResponseDelta, json!({ "text": text })),
        PipelineEvent::AudioSegment(audio) => (
            MessageType::AudioSegment,
            json!({
                "seq": audio.seq,
                "start_ms": audio.start_ms,
                "sample_rate": audio.sample_rate,
                "pcm_b64": base64::engine::general_purpose::STANDARD.encode(audio.pcm_le_bytes()),
            }),
        ),
        PipelineEvent::ExpressionFrames { seq, fps, frames } => (
            MessageType::ExpressionFrames,
            json!({
                "seq": seq,
                "fps": fps,
                "frames": frames.iter().map(|f| &f.params).collect::<Vec<_>>(),
            }),
        ),
        PipelineEvent::PlaybackSync {
            audio_timestamp_ms,
            frame_index,
            ..
        } => (
            MessageType::PlaybackSync,
            json!({ "audio_timestamp_ms": audio_timestamp_ms, "frame_index": frame_index }),
        ),
        PipelineEvent::MotionSelected { clip_id, score } => (
            MessageType::MotionSelected,
            json!({ "clip_id": clip_id, "score": score }),
        ),
        PipelineEvent::Error { message } => (MessageType::Error, json!({ "message": message })),
        PipelineEvent::TurnEnd {
            turn_id,
            ttfa_ms,
            aborted,
        } => (
            MessageType::TurnEnd,
            json!({ "turn_id": turn_id, "ttfa_ms": ttfa_ms, "aborted": aborted }),
        ),
    }
}

/// A client frame. The text may sit at the top level or under `payload`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClientMessage {
    Transcript(String),
}

pub fn parse_client_message(frame: &str) -> Result<ClientMessage, String> {
    let value: Value = serde_json::from_str(frame).map_err(|e| format!("invalid JSON: {e}"))?;
    let kind = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or("missing string field \"type\"")?;
    if kind != "transcript" {
        return Err(format!("unsupported message type {kind:?}"));
    }
    let text = value
        .get("text")
        .or_else(|| value.get("payload").and_then(|p| p.get("text")))
        .and_then(Value::as_str)
        .ok_or("transcript needs a string field \"text\"")?;
    Ok(ClientMessage::Transcript(text.to_owned()))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("message {index} ({found:?}) breaks the turn grammar: {reason}")]
pub struct GrammarViolation {
    pub index: usize,
    pub found: MessageType,
    pub reason: &'static str,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Start,
    Deltas,
    Audio,
    Frames,
    Motion,
    Failed,
    Done,
}

/// Checks one turn's server messages against
///
/// ```text
/// retrieval_debug? response_delta* (audio_segment expression_frames playback_sync*)* motion_selected turn_end
/// ```
///
/// An aborted turn may stop anywhere with `error turn_end`.
pub fn check_turn_grammar(kinds: &[MessageType]) -> Result<(), GrammarViolation> {
    use MessageType as M;
    let mut state = State::Start;
    for (index, &kind) in kinds.iter().enumerate() {
        let fail = |reason| GrammarViolation {
            index,
            found: kind,
            reason,
        };
        state = match (state, kind) {
            (State::Done, _) => return Err(fail("message after turn_end")),
            (State::Failed, M::TurnEnd) => State::Done,
            (State::Failed, _) => return Err(fail("only turn_end may follow an error")),
            (_, M::Error) => State::Failed,
            (_, M::Transcript) => return Err(fail("transcript is a client message")),
            (State::Start, M::RetrievalDebug) => State::Deltas,
            (_, M::RetrievalDebug) => return Err(fail("retrieval_debug must open the turn")),
            (State::Start | State::Deltas, M::ResponseDelta) => State::Deltas,
            (_, M::ResponseDelta) => return Err(fail("response_delta after audio started")),
            (State::Start | State::Deltas | State::Frames, M::AudioSegment) => State::Audio,
            (State::Audio, M::ExpressionFrames) => State::Frames,
            (_, M::ExpressionFrames) => return Err(fail("expression_frames must follow audio_segment")),
            (State::Frames, M::PlaybackSync) => State::Frames,
            (_, M::PlaybackSync) => return Err(fail("playback_sync outside a segment block")),
            (_, M::AudioSegment) => return Err(fail("audio_segment must start a segment block")),
            (State::Start | State::Deltas | State::Frames, M::MotionSelected) => State::Motion,
            (_, M::MotionSelected) => return Err(fail("motion_selected out of place")),
            (State::Motion, M::TurnEnd) => State::Done,
            (_, M::TurnEnd) => return Err(fail("turn_end before motion_selected")),
        };
    }
    if state == State::Done {
        Ok(())
    } else {
        Err(GrammarViolation {
            index: kinds.len(),
            found: kinds.last().copied().unwrap_or(MessageType::TurnEnd),
            reason: "turn did not end with turn_end",
        })
    }
}
