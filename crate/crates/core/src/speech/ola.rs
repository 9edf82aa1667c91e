use serde::{Deserialize, Serialize};

use super::SpeechError;

pub const DEFAULT_CHUNK_MS: u32 = 150;
pub const DEFAULT_OVERLAP_MS: u32 = 20;

/// A slice of streamed audio that overlaps the previous chunk by
/// `overlap_ms`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AudioChunk {
    pub samples: Vec<i16>,
    pub sample_rate: u32,
    /// Nominal chunk length.
    pub chunk_ms: u32,
    /// Overlap with the previous chunk; ignored for the first chunk.
    pub overlap_ms: u32,
}

impl AudioChunk {
    pub fn overlap_samples(&self) -> usize {
        (u64::from(self.overlap_ms) * u64::from(self.sample_rate) / 1000) as usize
    }
}

/// Equal-gain linear crossfade over `len` samples, yielding
/// `(outgoing, incoming)` gains. Gains are sampled at bin centers so they
/// are symmetric and sum to exactly one.
pub fn crossfade_gains(len: usize) -> impl Iterator<Item = (f64, f64)> {
    (0..len).map(move |j| {
        let incoming = (j as f64 + 0.5) / len as f64;
        (1.0 - incoming, incoming)
    })
}

/// Reconstructs a continuous buffer from overlapping chunks by
/// cross-fading each overlap region.
///
/// The output holds `sum(len) - sum(overlap)` samples. A single chunk is
/// returned unchanged.
pub fn overlap_add(chunks: &[AudioChunk]) -> Result<Vec<i16>, SpeechError> {
    let Some(first) = chunks.first() else {
        return Err(SpeechError::NoAudio);
    };
    let rate = first.sample_rate;
    let mut out: Vec<i16> = Vec::with_capacity(chunks.iter().map(|c| c.samples.len()).sum());
    for (index, chunk) in chunks.iter().enumerate() {
        if chunk.sample_rate != rate {
            return Err(SpeechError::SampleRate {
                expected: rate,
                found: chunk.sample_rate,
            });
        }
        if index == 0 {
            out.extend_from_slice(&chunk.samples);
            continue;
        }
        let overlap = chunk.overlap_samples();
        if overlap >= chunk.samples.len() || overlap > out.len() {
            return Err(SpeechError::Overlap {
                index,
                overlap,
                len: chunk.samples.len().min(out.len()),
            });
        }
        let tail_start = out.len() - overlap;
        for ((dst, &incoming), (g_out, g_in)) in out[tail_start..]
            .iter_mut()
            .zip(&chunk.samples[..overlap])
            .zip(crossfade_gains(overlap))
        {
            let mixed = f64::from(*dst) * g_out + f64::from(incoming) * g_in;
            *dst = mixed.round().clamp(f64::from(i16::MIN), f64::from(i16::MAX)) as i16;
        }
        out.extend_from_slice(&chunk.samples[overlap..]);
    }
    Ok(out)
}
