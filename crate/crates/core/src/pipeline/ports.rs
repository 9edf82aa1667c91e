use std::sync::Arc;

use async_trait::async_trait;

use crate::avatar::{ExpressionDriver, MotionLibrary};
use crate::clock::Clock;
use crate::embedding::EmbeddingProvider;
use crate::retrieval::{Generator, KnowledgeBase, RetrievalError, RetrievalOutcome, RetrievalResult};
use crate::speech::TtsBackend;
use crate::types::{DialogueTurn, SessionId};

/// Retrieval and history side of a turn.
#[async_trait]
pub trait KnowledgePort: Send + Sync {
    async fn retrieve(&self, session: &SessionId, query: &str) -> Result<RetrievalOutcome, RetrievalError>;

    /// Called once per completed turn.
    async fn record_turn(&self, session: &SessionId, question: &str, answer: &str) -> Result<(), RetrievalError>;
}

#[async_trait]
impl KnowledgePort for KnowledgeBase {
    async fn retrieve(&self, session: &SessionId, query: &str) -> Result<RetrievalOutcome, RetrievalError> {
        KnowledgeBase::retrieve(self, session, query, self.config().top_k)
    }

    async fn record_turn(&self, session: &SessionId, question: &str, answer: &str) -> Result<(), RetrievalError> {
        self.add_history(session, question, answer).map(|_| ())
    }
}

/// Knowledge port with nothing in it.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoKnowledge;

#[async_trait]
impl KnowledgePort for NoKnowledge {
    async fn retrieve(&self, _: &SessionId, _: &str) -> Result<RetrievalOutcome, RetrievalError> {
        Ok(RetrievalOutcome {
            routed_domain: None,
            results: Vec::new(),
            scanned: 0,
        })
    }

    async fn record_turn(&self, _: &SessionId, _: &str, _: &str) -> Result<(), RetrievalError> {
        Ok(())
    }
}

/// Generator that always answers with the same text, as a single delta.
#[derive(Debug, Clone)]
pub struct FixedAnswer(pub String);

#[async_trait]
impl Generator for FixedAnswer {
    async fn generate(&self, _: &str, _: &[DialogueTurn], _: &[RetrievalResult]) -> Result<Vec<String>, RetrievalError> {
        Ok(vec![self.0.clone()])
    }
}

/// Everything a turn talks to.
#[derive(Clone)]
pub struct Ports {
    pub knowledge: Arc<dyn KnowledgePort>,
    pub generator: Arc<dyn Generator>,
    pub tts: Arc<dyn TtsBackend>,
    pub expression: Arc<dyn ExpressionDriver>,
    pub motions: Arc<MotionLibrary>,
    /// Embeds response text for motion selection.
    pub embedder: Arc<dyn EmbeddingProvider>,
    pub clock: Arc<dyn Clock>,
}
