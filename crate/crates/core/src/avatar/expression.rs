use serde::{Deserialize, Serialize};

use super::AvatarError;
use crate::speech::AudioSegment;
use crate::sync::frame_count;

/// Expression parameters for one visual frame. The mock driver emits a
/// single mouth-open value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpressionFrame {
    pub params: Vec<f32>,
    pub frame: u64,
}

/// Speech-to-expression model contract: audio in, one parameter vector per
/// visual frame out, frames dense from zero.
pub trait ExpressionDriver: Send + Sync {
    fn drive(&self, audio: &AudioSegment, fps: u32) -> Result<Vec<ExpressionFrame>, AvatarError>;
}

/// Mouth-open from windowed RMS: `min(1, rms / normalization)`.
#[derive(Debug, Clone, Copy)]
pub struct RmsExpressionDriver {
    pub normalization: f64,
}

impl Default for RmsExpressionDriver {
    fn default() -> Self {
        Self { normalization: 0.35 }
    }
}

impl ExpressionDriver for RmsExpressionDriver {
    fn drive(&self, audio: &AudioSegment, fps: u32) -> Result<Vec<ExpressionFrame>, AvatarError> {
        if fps == 0 {
            return Err(AvatarError::Provider("fps must be positive".into()));
        }
        Ok(mouth_open_frames(audio, fps, self.normalization))
    }
}

/// Default mock driver.
pub fn drive_expressions(audio: &AudioSegment, fps: u32) -> Vec<ExpressionFrame> {
    mouth_open_frames(audio, fps, RmsExpressionDriver::default().normalization)
}

fn mouth_open_frames(audio: &AudioSegment, fps: u32, normalization: f64) -> Vec<ExpressionFrame> {
    let n = audio.samples.len();
    let rate = u64::from(audio.sample_rate);
    let frames = frame_count(audio.duration_ms(), fps);
    (0..frames)
        .map(|frame| {
            let mut start = (frame * rate / u64::from(fps)) as usize;
            let end = (((frame + 1) * rate / u64::from(fps)) as usize).min(n);
            // Rounding of the duration can leave the last frame past the
            // final sample; reuse the tail.
            if start >= end {
                start = end.saturating_sub(1);
            }
            let window = &audio.samples[start..end];
            let value = if window.is_empty() {
                0.0
            } else {
                let mean_sq = window
                    .iter()
                    .map(|&s| {
                        let x = f64::from(s) / f64::from(i16::MAX);
                        x * x
                    })
                    .sum::<f64>()
                    / window.len() as f64;
                (mean_sq.sqrt() / normalization).min(1.0)
            };
            ExpressionFrame {
                params: vec![value as f32],
                frame,
            }
        })
        .collect()
}
