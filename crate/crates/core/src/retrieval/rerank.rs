use std::sync::Arc;

use super::{RetrievalError, RetrievalResult};
use crate::embedding::{cosine, EmbeddingProvider};

/// Multiplier applied to cosine similarity by the mock reranker, to land
/// in the range of cross-encoder logits.
pub const RERANK_SCALE: f64 = 10.0;

/// Rescoring stage. Implementations set `rerank_score` and return the
/// candidates sorted by it, descending; `rank` is assigned by the caller.
pub trait Reranker: Send + Sync {
    fn rerank(&self, query: &str, candidates: Vec<RetrievalResult>) -> Result<Vec<RetrievalResult>, RetrievalError>;
}

/// `rerank_score = 10 * cosine(query, chunk)`.
#[derive(Clone)]
pub struct MockReranker {
    provider: Arc<dyn EmbeddingProvider>,
    scale: f64,
}

impl MockReranker {
    pub fn new(provider: Arc<dyn EmbeddingProvider>) -> Self {
        Self {
            provider,
            scale: RERANK_SCALE,
        }
    }
}

impl Reranker for MockReranker {
    fn rerank(&self, query: &str, mut candidates: Vec<RetrievalResult>) -> Result<Vec<RetrievalResult>, RetrievalError> {
        let q = self.provider.embed(query);
        for c in &mut candidates {
            c.rerank_score = self.scale * cosine(&q, &c.chunk.embedding)?;
        }
        // Stable: equal scores keep their incoming order.
        candidates.sort_by(|a, b| b.rerank_score.total_cmp(&a.rerank_score));
        Ok(candidates)
    }
}

/// Runs `reranker` and assigns 1-based ranks.
pub fn rerank(
    reranker: &dyn Reranker,
    query: &str,
    candidates: Vec<RetrievalResult>,
) -> Result<Vec<RetrievalResult>, RetrievalError> {
    let mut out = reranker.rerank(query, candidates)?;
    for (i, r) in out.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(out)
}
