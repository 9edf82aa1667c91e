use std::sync::Arc;

use async_trait::async_trait;
use talkhead_core::embedding::{Embedding, EmbeddingProvider};
use talkhead_core::retrieval::{Generator, Reranker, RetrievalError, RetrievalResult};
use talkhead_core::speech::{AudioChunk, SpeechError, TtsBackend, TtsRequest};
use talkhead_core::{DialogueTurn, Role};

use super::client::{ProviderClient, ProviderError};
use super::protocol::{decode_pcm, Candidate, HistoryEntry, Passage, ProviderReply, ProviderRequest};

async fn call_blocking(client: &Arc<ProviderClient>, request: ProviderRequest) -> Result<Vec<ProviderReply>, ProviderError> {
    let client = client.clone();
    tokio::task::spawn_blocking(move || client.call(request))
        .await
        .map_err(|e| ProviderError::Io(format!("provider task failed: {e}")))?
}

fn unexpected(reply: &ProviderReply) -> String {
    format!("unexpected reply {reply:?}")
}

/// Speech synthesis through a provider.
pub struct RemoteTts {
    client: Arc<ProviderClient>,
}

impl RemoteTts {
    pub fn new(client: Arc<ProviderClient>) -> Self {
        Self { client }
    }
}

#[async_trait]
impl TtsBackend for RemoteTts {
    async fn synthesize_chunks(&self, request: &TtsRequest) -> Result<Vec<AudioChunk>, SpeechError> {
        let replies = call_blocking(
            &self.client,
            ProviderRequest::Synthesize {
                text: request.text.clone(),
                voice_id: request.voice_id.clone(),
                sample_rate: request.sample_rate,
            },
        )
        .await
        .map_err(|e| SpeechError::Backend(e.to_string()))?;
        replies
            .into_iter()
            .map(|r| match r {
                ProviderReply::AudioChunk {
                    pcm_b64,
                    sample_rate,
                    chunk_ms,
                    overlap_ms,
                } => Ok(AudioChunk {
                    samples: decode_pcm(&pcm_b64).map_err(SpeechError::Backend)?,
                    sample_rate,
                    chunk_ms,
                    overlap_ms,
                }),
                other => Err(SpeechError::Backend(unexpected(&other))),
            })
            .collect()
    }
}

/// Answer generation through a provider.
pub struct RemoteGenerator {
    client: Arc<ProviderClient>,
}

impl RemoteGenerator {
    pub fn new(client: Arc<ProviderClient>) -> Self {
        Self { client }
    }
}

#[async_trait]
impl Generator for RemoteGenerator {
    async fn generate(
        &self,
        query: &str,
        history: &[DialogueTurn],
        passages: &[RetrievalResult],
    ) -> Result<Vec<String>, RetrievalError> {
        let request = ProviderRequest::Generate {
            query: query.to_owned(),
            history: history
                .iter()
                .map(|t| HistoryEntry {
                    role: match t.role {
                        Role::User => "user",
                        Role::Assistant => "assistant",
                    }
                    .to_owned(),
                    text: t.text.clone(),
                })
                .collect(),
            passages: passages
                .iter()
                .map(|p| Passage {
                    chunk_id: p.chunk.id.clone(),
                    domain: p.chunk.domain.clone(),
                    text: p.chunk.text.clone(),
                    rerank_score: p.rerank_score,
                })
                .collect(),
        };
        let replies = call_blocking(&self.client, request)
            .await
            .map_err(|e| RetrievalError::Provider(e.to_string()))?;
        replies
            .into_iter()
            .map(|r| match r {
                ProviderReply::Delta { text } => Ok(text),
                other => Err(RetrievalError::Provider(unexpected(&other))),
            })
            .collect()
    }
}

/// Text embedding through a provider. The trait is infallible, so a failed
/// call yields the zero vector (which retrieval treats as "no match").
pub struct RemoteEmbedding {
    client: Arc<ProviderClient>,
    dimension: usize,
}

impl RemoteEmbedding {
    pub fn new(client: Arc<ProviderClient>, dimension: usize) -> Self {
        Self { client, dimension }
    }

    pub fn try_embed(&self, text: &str) -> Result<Embedding, ProviderError> {
        let replies = self.client.call(ProviderRequest::Embed { text: text.to_owned() })?;
        match replies.as_slice() {
            [ProviderReply::Embedding { values }] if values.len() == self.dimension => {
                Ok(Embedding::new(values.clone()).normalized())
            }
            [ProviderReply::Embedding { values }] => Err(ProviderError::Protocol(format!(
                "embedding has dimension {}, expected {}",
                values.len(),
                self.dimension
            ))),
            other => Err(ProviderError::Protocol(format!("expected one embedding, got {other:?}"))),
        }
    }
}

impl EmbeddingProvider for RemoteEmbedding {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn embed(&self, text: &str) -> Embedding {
        self.try_embed(text).unwrap_or_else(|e| {
            tracing::warn!(provider = self.client.name(), error = %e, "embedding failed");
            Embedding::zeros(self.dimension)
        })
    }
}

/// Reranking through a provider: one score per candidate, in order.
pub struct RemoteReranker {
    client: Arc<ProviderClient>,
}

impl RemoteReranker {
    pub fn new(client: Arc<ProviderClient>) -> Self {
        Self { client }
    }
}

impl Reranker for RemoteReranker {
    fn rerank(&self, query: &str, mut candidates: Vec<RetrievalResult>) -> Result<Vec<RetrievalResult>, RetrievalError> {
        let request = ProviderRequest::Rerank {
            query: query.to_owned(),
            candidates: candidates
                .iter()
                .map(|c| Candidate {
                    chunk_id: c.chunk.id.clone(),
                    text: c.chunk.text.clone(),
                })
                .collect(),
        };
        let replies = self
            .client
            .call(request)
            .map_err(|e| RetrievalError::Provider(e.to_string()))?;
        let scores = match replies.as_slice() {
            [ProviderReply::Scores { scores }] if scores.len() == candidates.len() => scores,
            other => {
                return Err(RetrievalError::Provider(format!(
                    "expected {} scores, got {other:?}",
                    candidates.len()
                )))
            }
        };
        for (c, s) in candidates.iter_mut().zip(scores) {
            c.rerank_score = *s;
        }
        candidates.sort_by(|a, b| b.rerank_score.total_cmp(&a.rerank_score));
        Ok(candidates)
    }
}
