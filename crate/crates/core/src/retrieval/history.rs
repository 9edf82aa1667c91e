use std::collections::HashMap;

use super::{KnowledgeChunk, Origin, RetrievalError};
use crate::embedding::EmbeddingProvider;
use crate::types::SessionId;

/// Domain label carried by history chunks.
pub const HISTORY_DOMAIN: &str = "history";

pub fn history_chunk_text(question: &str, answer: &str) -> String {
    format!("Q: {question}\nA: {answer}")
}

/// Per-session dialogue memory, one chunk per question/answer pair.
#[derive(Debug, Default, Clone)]
pub struct HistoryStore {
    sessions: HashMap<SessionId, Vec<KnowledgeChunk>>,
}

impl HistoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(
        &mut self,
        session: &SessionId,
        question: &str,
        answer: &str,
        provider: &dyn EmbeddingProvider,
    ) -> Result<KnowledgeChunk, RetrievalError> {
        if question.trim().is_empty() || answer.trim().is_empty() {
            return Err(RetrievalError::EmptyTurn);
        }
        let entries = self.sessions.entry(session.clone()).or_default();
        let text = history_chunk_text(question, answer);
        let chunk = KnowledgeChunk {
            id: format!("{HISTORY_DOMAIN}/{session}/{:04}", entries.len()),
            embedding: provider.embed(&text),
            text,
            domain: HISTORY_DOMAIN.to_owned(),
            origin: Origin::History,
            session: Some(session.clone()),
        };
        entries.push(chunk.clone());
        Ok(chunk)
    }

    pub fn session(&self, session: &SessionId) -> &[KnowledgeChunk] {
        self.sessions.get(session).map_or(&[], Vec::as_slice)
    }

    pub fn clear_session(&mut self, session: &SessionId) {
        self.sessions.remove(session);
    }
}
