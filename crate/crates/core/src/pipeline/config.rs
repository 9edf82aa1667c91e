use serde::{Deserialize, Serialize};

use crate::speech::{MockTtsConfig, WakeGateConfig, DEFAULT_SAMPLE_RATE};
use crate::sync::DEFAULT_FPS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthesisMode {
    /// Split the answer and overlap synthesis with playback.
    Segmented,
    /// Synthesize the whole answer before playing anything.
    NonSegmented,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: SynthesisMode,
    pub min_chars: usize,
    pub max_chars: usize,
    pub fps: u32,
    /// Capacity of the queue between the synthesis and playback lanes.
    pub queue_capacity: usize,
    /// Fixed simulated cost of the retrieval stage.
    pub retrieval_overhead_ms: u64,
    /// Fixed simulated cost of the generation stage.
    pub generation_overhead_ms: u64,
    pub voice_id: String,
    pub sample_rate: u32,
    pub mock_tts: MockTtsConfig,
    pub wake: WakeGateConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: SynthesisMode::Segmented,
            min_chars: 20,
            max_chars: 120,
            fps: DEFAULT_FPS,
            queue_capacity: 8,
            retrieval_overhead_ms: 20,
            generation_overhead_ms: 30,
            voice_id: "default".to_owned(),
            sample_rate: DEFAULT_SAMPLE_RATE,
            mock_tts: MockTtsConfig::default(),
            wake: WakeGateConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.queue_capacity == 0 {
            return Err("queue_capacity must be at least 1".into());
        }
        if self.fps == 0 || self.fps >= 1000 {
            return Err("fps must be in 1..1000".into());
        }
        if self.min_chars == 0 || self.min_chars > self.max_chars {
            return Err(format!(
                "splitter bounds invalid: min_chars={} max_chars={}",
                self.min_chars, self.max_chars
            ));
        }
        if self.sample_rate == 0 {
            return Err("sample_rate must be positive".into());
        }
        if self.mock_tts.overlap_ms >= self.mock_tts.chunk_ms {
            return Err("tts overlap_ms must be shorter than chunk_ms".into());
        }
        Ok(())
    }
}
