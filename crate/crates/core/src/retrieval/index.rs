use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::rerank::Reranker;
use super::RetrievalError;
use crate::embedding::{cosine, cosine_from_parts, lane_dot, Embedding, EmbeddingProvider};
use crate::types::CoreError;
use crate::types::SessionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Corpus,
    History,
}

/// A retrievable text unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeChunk {
    pub id: String,
    pub text: String,
    pub embedding: Embedding,
    pub domain: String,
    pub origin: Origin,
    /// Owning session; set exactly for history chunks.
    pub session: Option<SessionId>,
}

impl KnowledgeChunk {
    pub fn corpus(
        id: impl Into<String>,
        text: impl Into<String>,
        domain: impl Into<String>,
        provider: &dyn EmbeddingProvider,
    ) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            embedding: provider.embed(&text),
            text,
            domain: domain.into(),
            origin: Origin::Corpus,
            session: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalResult {
    pub chunk: KnowledgeChunk,
    pub similarity: f64,
    pub rerank_score: f64,
    /// 1-based.
    pub rank: usize,
}

/// Flat exact-search index for one domain.
#[derive(Debug, Clone)]
pub struct DomainIndex {
    domain: String,
    chunks: Vec<KnowledgeChunk>,
    positions: HashMap<String, usize>,
    centroid: Option<Embedding>,
    /// Row-major copy of the chunk embeddings, scanned during search.
    matrix: Vec<f32>,
    /// Squared norm of each matrix row.
    norms_sq: Vec<f64>,
    dim: usize,
}

impl DomainIndex {
    pub fn new(domain: impl Into<String>) -> Self {
        Self {
            domain: domain.into(),
            chunks: Vec::new(),
            positions: HashMap::new(),
            centroid: None,
            matrix: Vec::new(),
            norms_sq: Vec::new(),
            dim: 0,
        }
    }

    pub fn domain(&self) -> &str {
        &self.domain
    }

    pub fn chunks(&self) -> &[KnowledgeChunk] {
        &self.chunks
    }

    pub fn len(&self) -> usize {
        self.chunks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chunks.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&KnowledgeChunk> {
        self.positions.get(id).map(|&i| &self.chunks[i])
    }

    /// Normalized mean of the chunk embeddings; `None` while empty.
    pub fn centroid(&self) -> Option<&Embedding> {
        self.centroid.as_ref()
    }

    /// Adds chunks, replacing any with the same id, and recomputes the
    /// centroid. Nothing is inserted if any chunk belongs to another domain.
    pub fn upsert(&mut self, chunks: impl IntoIterator<Item = KnowledgeChunk>) -> Result<(), RetrievalError> {
        let chunks: Vec<KnowledgeChunk> = chunks.into_iter().collect();
        if let Some(bad) = chunks.iter().find(|c| c.domain != self.domain) {
            return Err(RetrievalError::DomainMismatch {
                id: bad.id.clone(),
                expected: self.domain.clone(),
                found: bad.domain.clone(),
            });
        }
        let dim = match (self.chunks.is_empty(), chunks.first()) {
            (false, _) => self.dim,
            (true, Some(c)) => c.embedding.dimension(),
            (true, None) => 0,
        };
        if let Some(bad) = chunks.iter().find(|c| c.embedding.dimension() != dim) {
            return Err(RetrievalError::Core(CoreError::Dimension {
                left: dim,
                right: bad.embedding.dimension(),
            }));
        }
        self.dim = dim;
        for chunk in chunks {
            match self.positions.get(&chunk.id) {
                Some(&i) => {
                    let v = chunk.embedding.values();
                    self.matrix[i * dim..(i + 1) * dim].copy_from_slice(v);
                    self.norms_sq[i] = lane_dot(v, v);
                    self.chunks[i] = chunk;
                }
                None => {
                    self.positions.insert(chunk.id.clone(), self.chunks.len());
                    let v = chunk.embedding.values();
                    self.matrix.extend_from_slice(v);
                    self.norms_sq.push(lane_dot(v, v));
                    self.chunks.push(chunk);
                }
            }
        }
        self.centroid = Embedding::mean(self.chunks.iter().map(|c| &c.embedding));
        Ok(())
    }
}

/// Candidate ordered so that the *worse* candidate compares greater, which
/// makes a max-heap evict the worst first. Better = higher similarity, then
/// smaller id.
struct Worst<'a> {
    similarity: f64,
    chunk: &'a KnowledgeChunk,
}

impl Ord for Worst<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .similarity
            .total_cmp(&self.similarity)
            .then_with(|| self.chunk.id.cmp(&other.chunk.id))
    }
}

impl PartialOrd for Worst<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Worst<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Worst<'_> {}

/// Exact top-`k` chunks by cosine similarity, best first, ties broken by
/// id. Returns `(chunk, similarity)` pairs.
pub fn top_k<'a>(
    candidates: impl IntoIterator<Item = &'a KnowledgeChunk>,
    query: &Embedding,
    k: usize,
) -> Result<Vec<(&'a KnowledgeChunk, f64)>, RetrievalError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut heap: BinaryHeap<Worst<'a>> = BinaryHeap::with_capacity(k + 1);
    for chunk in candidates {
        offer(
            &mut heap,
            k,
            Worst {
                similarity: cosine(query, &chunk.embedding)?,
                chunk,
            },
        );
    }
    Ok(sorted(heap))
}

fn offer<'a>(heap: &mut BinaryHeap<Worst<'a>>, k: usize, cand: Worst<'a>) {
    if heap.len() < k {
        heap.push(cand);
    } else if heap.peek().is_some_and(|worst| cand < *worst) {
        heap.pop();
        heap.push(cand);
    }
}

fn sorted(heap: BinaryHeap<Worst<'_>>) -> Vec<(&KnowledgeChunk, f64)> {
    heap.into_sorted_vec()
        .into_iter()
        .map(|w| (w.chunk, w.similarity))
        .collect()
}

/// [`top_k`] over several indexes, scanning their contiguous matrices.
fn top_k_indexes<'a>(
    indexes: &[&'a DomainIndex],
    query: &Embedding,
    k: usize,
) -> Result<Vec<(&'a KnowledgeChunk, f64)>, RetrievalError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut heap: BinaryHeap<Worst<'a>> = BinaryHeap::with_capacity(k + 1);
    let q = query.values();
    let q_sq = lane_dot(q, q);
    for ix in indexes.iter().filter(|ix| !ix.is_empty()) {
        if ix.dim != q.len() {
            return Err(RetrievalError::Core(CoreError::Dimension {
                left: q.len(),
                right: ix.dim,
            }));
        }
        let rows = ix.matrix.chunks_exact(ix.dim).zip(&ix.norms_sq);
        for (chunk, (row, &row_sq)) in ix.chunks.iter().zip(rows) {
            offer(
                &mut heap,
                k,
                Worst {
                    similarity: cosine_from_parts(lane_dot(q, row), q_sq, row_sq),
                    chunk,
                },
            );
        }
    }
    Ok(sorted(heap))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RetrievalOutput {
    pub results: Vec<RetrievalResult>,
    /// Number of chunks whose similarity was computed.
    pub scanned: usize,
}

/// Exact top-`k` over the given indexes plus `history`, merged, reranked
/// and truncated to `k`.
///
/// History chunks belonging to another session are skipped.
pub fn retrieve(
    indexes: &[&DomainIndex],
    history: &[KnowledgeChunk],
    session: &SessionId,
    query_text: &str,
    query: &Embedding,
    k: usize,
    reranker: &dyn Reranker,
) -> Result<RetrievalOutput, RetrievalError> {
    if indexes.iter().all(|ix| ix.is_empty()) {
        return Err(RetrievalError::EmptyCorpus);
    }
    let own_history: Vec<&KnowledgeChunk> = history
        .iter()
        .filter(|c| c.session.as_ref() == Some(session))
        .collect();
    let scanned = indexes.iter().map(|ix| ix.len()).sum::<usize>() + own_history.len();

    let mut merged = top_k_indexes(indexes, query, k)?;
    merged.extend(top_k(own_history, query, k)?);
    merged.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.id.cmp(&b.0.id)));

    let candidates: Vec<RetrievalResult> = merged
        .into_iter()
        .map(|(chunk, similarity)| RetrievalResult {
            chunk: chunk.clone(),
            similarity,
            rerank_score: similarity,
            rank: 0,
        })
        .collect();
    let mut results = if candidates.is_empty() {
        candidates
    } else {
        reranker.rerank(query_text, candidates)?
    };
    results.truncate(k);
    for (i, r) in results.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(RetrievalOutput { results, scanned })
}
