//! Retrieve-then-generate stack.
//!
//! Documents are chunked and stored in one flat [`DomainIndex`] per domain.
//! A query is optionally routed to a single domain by an
//! [`IntentClassifier`], searched exactly (brute force, top-k), merged with
//! the session's own dialogue history, reranked, and handed to a
//! [`Generator`].

mod chunking;
mod generate;
mod history;
mod index;
mod kb;
mod rerank;
mod routing;

pub use chunking::{chunk_document, chunk_spans};
pub use generate::{Generator, MockGenerator, FALLBACK_ANSWER};
pub use history::{history_chunk_text, HistoryStore, HISTORY_DOMAIN};
pub use index::{retrieve, top_k, DomainIndex, KnowledgeChunk, Origin, RetrievalOutput, RetrievalResult};
pub use kb::{read_corpus_dir, IngestReport, KnowledgeBase, RetrievalConfig, RetrievalOutcome};
pub use rerank::{rerank, MockReranker, Reranker, RERANK_SCALE};
pub use routing::{route_intent, IntentClassifier, NearestCentroid};

use thiserror::Error;

use crate::types::CoreError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RetrievalError {
    #[error("document is empty")]
    EmptyDoc,
    #[error("overlap_chars ({overlap}) must be smaller than target_chars ({target})")]
    InvalidChunking { target: usize, overlap: usize },
    #[error("chunk {id:?} has domain {found:?}, index is {expected:?}")]
    DomainMismatch {
        id: String,
        expected: String,
        found: String,
    },
    #[error("unknown domain {0:?}")]
    UnknownDomain(String),
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("intent routing needs at least two non-empty domain indexes")]
    RoutingUnavailable,
    #[error("question and answer must be non-empty")]
    EmptyTurn,
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("provider failed: {0}")]
    Provider(String),
    #[error("io: {0}")]
    Io(String),
}
