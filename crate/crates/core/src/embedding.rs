//! Text embeddings and cosine similarity.
//!
//! The default provider is a hashed bag-of-words: lowercase alphanumeric
//! tokens are lightly stemmed, hashed (FNV-1a, 64 bit) into `dimension`
//! buckets, counts are accumulated and the vector is L2-normalized. It is deterministic and
//! offline; neural providers implement [`EmbeddingProvider`] instead.

use serde::{Deserialize, Serialize};

use crate::types::CoreError;

pub const DEFAULT_DIMENSION: usize = 256;

/// Dense embedding vector. Components are stored as `f32`; similarity math
/// accumulates in `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding(Vec<f32>);

impl Embedding {
    /// Wraps raw components. Non-finite components are replaced by zero.
    pub fn new(values: Vec<f32>) -> Self {
        Self(
            values
                .into_iter()
                .map(|v| if v.is_finite() { v } else { 0.0 })
                .collect(),
        )
    }

    pub fn zeros(dimension: usize) -> Self {
        Self(vec![0.0; dimension])
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .map(|&v| f64::from(v) * f64::from(v))
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Unit-length copy; the zero vector stays zero.
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            return self.clone();
        }
        Self(self.0.iter().map(|&v| (f64::from(v) / n) as f32).collect())
    }

    pub fn scaled(&self, factor: f32) -> Self {
        Self::new(self.0.iter().map(|&v| v * factor).collect())
    }

    /// Normalized mean of `items`. `None` when `items` is empty or the
    /// dimensions disagree.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a Embedding>) -> Option<Self> {
        let mut iter = items.into_iter();
        let first = iter.next()?;
        let mut acc: Vec<f64> = first.0.iter().map(|&v| f64::from(v)).collect();
        let mut count = 1usize;
        for e in iter {
            if e.dimension() != acc.len() {
                return None;
            }
            for (a, &v) in acc.iter_mut().zip(&e.0) {
                *a += f64::from(v);
            }
            count += 1;
        }
        let mean = Self(acc.iter().map(|&a| (a / count as f64) as f32).collect());
        Some(mean.normalized())
    }
}

/// Cosine similarity in `[-1, 1]`; zero when either side is the zero vector.
pub fn cosine(a: &Embedding, b: &Embedding) -> Result<f64, CoreError> {
    if a.dimension() != b.dimension() {
        return Err(CoreError::Dimension {
            left: a.dimension(),
            right: b.dimension(),
        });
    }
    Ok(cosine_values(&a.0, &b.0))
}

/// Cosine of two equal-length component slices.
pub(crate) fn cosine_values(a: &[f32], b: &[f32]) -> f64 {
    cosine_from_parts(lane_dot(a, b), lane_dot(a, a), lane_dot(b, b))
}

/// Dot product accumulated in `f64` over independent lanes, so the compiler
/// can vectorize it. The summation order is fixed, which keeps results
/// identical wherever the same pair is scored.
pub(crate) fn lane_dot(a: &[f32], b: &[f32]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    const LANES: usize = 8;
    let mut acc = [0.0f64; LANES];
    let (ca, cb) = (a.chunks_exact(LANES), b.chunks_exact(LANES));
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (xa, xb) in ca.zip(cb) {
        for j in 0..LANES {
            acc[j] += f64::from(xa[j]) * f64::from(xb[j]);
        }
    }
    for (&x, &y) in ra.iter().zip(rb) {
        acc[0] += f64::from(x) * f64::from(y);
    }
    acc.iter().sum()
}

pub(crate) fn cosine_from_parts(dot: f64, norm_sq_a: f64, norm_sq_b: f64) -> f64 {
    if norm_sq_a == 0.0 || norm_sq_b == 0.0 {
        return 0.0;
    }
    (dot / (norm_sq_a.sqrt() * norm_sq_b.sqrt())).clamp(-1.0, 1.0)
}

pub trait EmbeddingProvider: Send + Sync {
    fn dimension(&self) -> usize;
    fn embed(&self, text: &str) -> Embedding;
}

#[derive(Debug, Clone, Copy)]
pub struct HashedBagOfWords {
    dimension: usize,
}

impl HashedBagOfWords {
    pub fn new(dimension: usize) -> Result<Self, CoreError> {
        if dimension < 2 {
            return Err(CoreError::InvalidDimension(dimension));
        }
        Ok(Self { dimension })
    }

    pub fn bucket(&self, token: &str) -> usize {
        // The low bits of FNV-1a depend only on the low bits of each step,
        // so fold the high half in before reducing.
        let h = fnv1a64(token.as_bytes());
        ((h ^ (h >> 32)) % self.dimension as u64) as usize
    }
}

impl Default for HashedBagOfWords {
    fn default() -> Self {
        Self {
            dimension: DEFAULT_DIMENSION,
        }
    }
}

impl EmbeddingProvider for HashedBagOfWords {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Embedding {
        let mut counts = vec![0.0f64; self.dimension];
        for token in tokenize(text) {
            counts[self.bucket(stem(&token))] += 1.0;
        }
        let norm = counts.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Embedding::zeros(self.dimension);
        }
        Embedding(counts.iter().map(|&c| (c / norm) as f32).collect())
    }
}

/// Convenience wrapper around [`HashedBagOfWords`].
///
/// Panics if `dimension < 2`.
pub fn embed_text(text: &str, dimension: usize) -> Embedding {
    HashedBagOfWords::new(dimension)
        .expect("embedding dimension must be at least 2")
        .embed(text)
}

/// Lowercased maximal runs of alphanumeric characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

/// Strips one common English inflection (`-ing`, `-ed`, `-es`, `-s`) when
/// at least three characters remain, so "opens", "opening" and "open"
/// share a bucket.
pub fn stem(token: &str) -> &str {
    for suffix in ["ing", "ed", "es", "s"] {
        if let Some(base) = token.strip_suffix(suffix) {
            if base.chars().count() >= 3 && !base.ends_with('s') {
                return base;
            }
        }
    }
    token
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    bytes
        .iter()
        .fold(OFFSET, |h, &b| (h ^ u64::from(b)).wrapping_mul(PRIME))
}
