use std::sync::Mutex;

use serde::Serialize;

use crate::avatar::ExpressionFrame;
use crate::speech::AudioSegment;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalHit {
    pub chunk_id: String,
    pub similarity: f64,
    pub rerank_score: f64,
}

/// Everything a turn emits, in emission order.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PipelineEvent {
    RetrievalDebug {
        routed_domain: Option<String>,
        results: Vec<RetrievalHit>,
    },
    ResponseDelta {
        text: String,
    },
    AudioSegment(AudioSegment),
    ExpressionFrames {
        seq: usize,
        fps: u32,
        frames: Vec<ExpressionFrame>,
    },
    /// One per visual frame period of played audio.
    PlaybackSync {
        seq: usize,
        audio_timestamp_ms: u64,
        frame_index: u64,
        expression: ExpressionFrame,
    },
    MotionSelected {
        clip_id: String,
        score: f64,
    },
    Error {
        message: String,
    },
    TurnEnd {
        turn_id: u64,
        ttfa_ms: Option<u64>,
        aborted: bool,
    },
}

pub trait TurnSink: Send + Sync {
    fn emit(&self, event: PipelineEvent);
}

/// Discards events.
#[derive(Debug, Default, Clone, Copy)]
pub struct NullSink;

impl TurnSink for NullSink {
    fn emit(&self, _event: PipelineEvent) {}
}

/// Records events in memory.
#[derive(Debug, Default)]
pub struct CollectingSink {
    events: Mutex<Vec<PipelineEvent>>,
}

impl CollectingSink {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn take(&self) -> Vec<PipelineEvent> {
        std::mem::take(&mut *self.events.lock().expect("sink lock poisoned"))
    }
}

impl TurnSink for CollectingSink {
    fn emit(&self, event: PipelineEvent) {
        self.events.lock().expect("sink lock poisoned").push(event);
    }
}

impl<F: Fn(PipelineEvent) + Send + Sync> TurnSink for F {
    fn emit(&self, event: PipelineEvent) {
        self(event)
    }
}
