use async_trait::async_trait;

use super::{Origin, RetrievalError, RetrievalResult};
use crate::speech::split_response;
use crate::types::DialogueTurn;

pub const FALLBACK_ANSWER: &str = "Sorry, I could not find anything about that.";

/// Answer generator. Returns the answer as ordered text deltas whose
/// concatenation is the full answer.
#[async_trait]
pub trait Generator: Send + Sync {
    async fn generate(
        &self,
        query: &str,
        history: &[DialogueTurn],
        passages: &[RetrievalResult],
    ) -> Result<Vec<String>, RetrievalError>;
}

/// Template generator: one framing sentence naming the top passage's
/// domain, then up to `sentence_cap` sentences of that passage verbatim.
#[derive(Debug, Clone, Copy)]
pub struct MockGenerator {
    pub sentence_cap: usize,
}

impl Default for MockGenerator {
    fn default() -> Self {
        Self { sentence_cap: 3 }
    }
}

impl MockGenerator {
    pub fn deltas(&self, passages: &[RetrievalResult]) -> Vec<String> {
        let Some(top) = passages.first() else {
            return vec![FALLBACK_ANSWER.to_owned()];
        };
        let (framing, body) = match top.chunk.origin {
            Origin::History => (
                "As we discussed earlier.".to_owned(),
                top.chunk
                    .text
                    .split_once("\nA: ")
                    .map_or(top.chunk.text.as_str(), |(_, a)| a),
            ),
            Origin::Corpus => (
                format!("Here is what I found about {}.", top.chunk.domain),
                top.chunk.text.as_str(),
            ),
        };
        let mut out = vec![framing];
        if let Ok(sentences) = split_response(body, 1, usize::MAX) {
            out.extend(
                sentences
                    .iter()
                    .map(|s| s.text.trim())
                    .filter(|s| !s.is_empty())
                    .take(self.sentence_cap)
                    .map(|s| format!(" {s}")),
            );
        }
        out
    }
}

#[async_trait]
impl Generator for MockGenerator {
    async fn generate(
        &self,
        _query: &str,
        _history: &[DialogueTurn],
        passages: &[RetrievalResult],
    ) -> Result<Vec<String>, RetrievalError> {
        Ok(self.deltas(passages))
    }
}
