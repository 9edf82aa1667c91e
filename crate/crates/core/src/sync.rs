//! Audio playback clock to visual frame mapping.

use serde::{Deserialize, Serialize};

pub const DEFAULT_FPS: u32 = 30;

/// Playback position of the current turn's audio and the visual frame rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyncState {
    /// Milliseconds of audio played since the turn's playback started.
    pub audio_timestamp_ms: u64,
    pub fps: u32,
}

impl SyncState {
    pub fn new(audio_timestamp_ms: u64, fps: u32) -> Self {
        Self {
            audio_timestamp_ms,
            fps,
        }
    }

    pub fn frame_index(&self) -> u64 {
        frame_index(*self)
    }
}

/// Visual frame displayed at the given audio position:
/// `floor(audio_timestamp_ms * fps / 1000)`.
///
/// Flooring means a frame is never shown before its audio starts.
pub fn frame_index(state: SyncState) -> u64 {
    let scaled = u128::from(state.audio_timestamp_ms) * u128::from(state.fps) / 1000;
    u64::try_from(scaled).unwrap_or(u64::MAX)
}

/// Earliest audio timestamp (ms) at which `frame` is displayed.
pub fn frame_start_ms(frame: u64, fps: u32) -> u64 {
    debug_assert!(fps > 0);
    (u128::from(frame) * 1000).div_ceil(u128::from(fps)) as u64
}

/// Number of frames needed to cover `duration_ms` of audio.
pub fn frame_count(duration_ms: u64, fps: u32) -> u64 {
    (u128::from(duration_ms) * u128::from(fps)).div_ceil(1000) as u64
}
