//! Speech side of the pipeline: answer segmentation, TTS backends,
//! overlap-add chunk reconstruction and the wake-word gate.

mod ola;
mod segment;
mod tts;
mod wake;

pub use ola::{crossfade_gains, overlap_add, AudioChunk};
pub use segment::{split_response, Boundary, TextSegment, TERMINAL_PUNCTUATION};
pub use tts::{
    chunk_waveform, synthesize, AudioSegment, MockTts, MockTtsConfig, TtsBackend, TtsRequest,
    DEFAULT_SAMPLE_RATE,
};
pub use wake::{GateDecision, GateMode, WakeGate, WakeGateConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpeechError {
    #[error("text is empty")]
    EmptyText,
    #[error("invalid splitter bounds: min_chars={min} max_chars={max}")]
    InvalidBounds { min: usize, max: usize },
    #[error("chunks mix sample rates {expected} and {found}")]
    SampleRate { expected: u32, found: u32 },
    #[error("chunk {index}: overlap of {overlap} samples is not shorter than the chunk ({len} samples)")]
    Overlap {
        index: usize,
        overlap: usize,
        len: usize,
    },
    #[error("no audio chunks")]
    NoAudio,
    #[error("tts backend failed: {0}")]
    Backend(String),
}
