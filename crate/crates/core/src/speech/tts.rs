use std::sync::Arc;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use super::ola::{overlap_add, AudioChunk, DEFAULT_CHUNK_MS, DEFAULT_OVERLAP_MS};
use super::{SpeechError, TextSegment};
use crate::clock::Clock;

pub const DEFAULT_SAMPLE_RATE: u32 = 16_000;

/// Synthesized PCM (16-bit signed, mono) for one text segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AudioSegment {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
    pub seq: usize,
    /// Playback offset within the turn.
    pub start_ms: u64,
    pub source: TextSegment,
}

impl AudioSegment {
    pub fn duration_ms(&self) -> u64 {
        duration_ms(self.samples.len(), self.sample_rate)
    }

    pub fn end_ms(&self) -> u64 {
        self.start_ms + self.duration_ms()
    }

    /// Little-endian byte encoding of the samples.
    pub fn pcm_le_bytes(&self) -> Vec<u8> {
        self.samples.iter().flat_map(|s| s.to_le_bytes()).collect()
    }
}

fn duration_ms(samples: usize, rate: u32) -> u64 {
    (1000.0 * samples as f64 / f64::from(rate)).round() as u64
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtsRequest {
    pub text: String,
    pub voice_id: String,
    pub sample_rate: u32,
}

/// Streaming synthesizer. Returns the audio for one request as ordered
/// overlapping chunks.
#[async_trait]
pub trait TtsBackend: Send + Sync {
    async fn synthesize_chunks(&self, request: &TtsRequest) -> Result<Vec<AudioChunk>, SpeechError>;
}

/// Synthesizes `segment` through `backend` and overlap-adds the returned
/// chunks into one [`AudioSegment`] scheduled at `start_ms`.
pub async fn synthesize(
    backend: &dyn TtsBackend,
    segment: &TextSegment,
    voice_id: &str,
    sample_rate: u32,
    start_ms: u64,
) -> Result<AudioSegment, SpeechError> {
    let request = TtsRequest {
        text: segment.text.clone(),
        voice_id: voice_id.to_owned(),
        sample_rate,
    };
    let chunks = backend.synthesize_chunks(&request).await?;
    if let Some(bad) = chunks.iter().find(|c| c.sample_rate != sample_rate) {
        return Err(SpeechError::SampleRate {
            expected: sample_rate,
            found: bad.sample_rate,
        });
    }
    let samples = overlap_add(&chunks)?;
    if samples.is_empty() {
        return Err(SpeechError::NoAudio);
    }
    Ok(AudioSegment {
        samples,
        sample_rate,
        seq: segment.seq,
        start_ms,
        source: segment.clone(),
    })
}

/// Cuts a continuous waveform into chunks of `chunk_ms` overlapping by
/// `overlap_ms`, such that [`overlap_add`] reproduces it exactly.
pub fn chunk_waveform(samples: &[i16], sample_rate: u32, chunk_ms: u32, overlap_ms: u32) -> Vec<AudioChunk> {
    assert!(overlap_ms < chunk_ms, "overlap must be shorter than the chunk");
    let len = (u64::from(chunk_ms) * u64::from(sample_rate) / 1000).max(1) as usize;
    let overlap = (u64::from(overlap_ms) * u64::from(sample_rate) / 1000) as usize;
    let mut chunks = Vec::new();
    let mut start = 0;
    loop {
        let end = (start + len).min(samples.len());
        chunks.push(AudioChunk {
            samples: samples[start..end].to_vec(),
            sample_rate,
            chunk_ms,
            overlap_ms: if start == 0 { 0 } else { overlap_ms },
        });
        if end == samples.len() {
            return chunks;
        }
        start = end - overlap;
    }
}

/// Timing and waveform parameters of [`MockTts`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MockTtsConfig {
    /// Audio produced per input character.
    pub duration_ms_per_char: u64,
    /// Simulated synthesis time per input character.
    pub synth_ms_per_char: u64,
    pub frequency_hz: f64,
    /// Peak amplitude relative to full scale.
    pub amplitude: f64,
    pub chunk_ms: u32,
    pub overlap_ms: u32,
}

impl Default for MockTtsConfig {
    fn default() -> Self {
        Self {
            duration_ms_per_char: 60,
            synth_ms_per_char: 25,
            frequency_hz: 220.0,
            amplitude: 0.5,
            chunk_ms: DEFAULT_CHUNK_MS,
            overlap_ms: DEFAULT_OVERLAP_MS,
        }
    }
}

/// Deterministic stand-in synthesizer: a fixed sine whose length and
/// synthesis delay are linear in the character count.
pub struct MockTts {
    config: MockTtsConfig,
    clock: Arc<dyn Clock>,
}

impl MockTts {
    pub fn new(config: MockTtsConfig, clock: Arc<dyn Clock>) -> Self {
        Self { config, clock }
    }

    pub fn config(&self) -> &MockTtsConfig {
        &self.config
    }

    pub fn waveform(&self, char_count: usize, sample_rate: u32) -> Vec<i16> {
        let duration_ms = self.config.duration_ms_per_char * char_count as u64;
        let n = (duration_ms * u64::from(sample_rate) / 1000) as usize;
        let peak = self.config.amplitude * f64::from(i16::MAX);
        let step = std::f64::consts::TAU * self.config.frequency_hz / f64::from(sample_rate);
        (0..n)
            .map(|i| (peak * (step * i as f64).sin()).round() as i16)
            .collect()
    }
}

#[async_trait]
impl TtsBackend for MockTts {
    async fn synthesize_chunks(&self, request: &TtsRequest) -> Result<Vec<AudioChunk>, SpeechError> {
        let chars = request.text.chars().count();
        if chars == 0 {
            return Err(SpeechError::EmptyText);
        }
        self.clock
            .sleep_ms(self.config.synth_ms_per_char * chars as u64)
            .await;
        let wave = self.waveform(chars, request.sample_rate);
        Ok(chunk_waveform(
            &wave,
            request.sample_rate,
            self.config.chunk_ms,
            self.config.overlap_ms,
        ))
    }
}
