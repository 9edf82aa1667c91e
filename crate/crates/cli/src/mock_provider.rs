//! Stand-alone provider process backed by the in-process mocks. Handy for
//! exercising the subprocess transport without any model installed.

use std::io::{self, BufReader};
use std::sync::Arc;

use anyhow::Result;
use talkhead_core::retrieval::{Generator, KnowledgeChunk, MockGenerator, RetrievalResult, RERANK_SCALE};
use talkhead_core::speech::{MockTts, MockTtsConfig, TtsBackend, TtsRequest};
use talkhead_core::{cosine, EmbeddingProvider, HashedBagOfWords, SystemClock};
use talkhead_service::provider::{encode_pcm, serve_lines, ProviderReply, ProviderRequest};

pub fn run(dim: usize, clock_speed: f64) -> Result<()> {
    let embedder = HashedBagOfWords::new(dim)?;
    let tts = MockTts::new(MockTtsConfig::default(), Arc::new(SystemClock::with_speed(clock_speed)));
    let generator = MockGenerator::default();
    let rt = tokio::runtime::Builder::new_current_thread().enable_time().build()?;

    let stdin = io::stdin();
    let stdout = io::stdout();
    serve_lines(BufReader::new(stdin.lock()), stdout.lock(), |request| match request {
        ProviderRequest::Synthesize {
            text,
            voice_id,
            sample_rate,
        } => {
            let req = TtsRequest {
                text,
                voice_id,
                sample_rate,
            };
            let chunks = rt.block_on(tts.synthesize_chunks(&req)).map_err(|e| e.to_string())?;
            Ok(chunks
                .into_iter()
                .map(|c| ProviderReply::AudioChunk {
                    pcm_b64: encode_pcm(&c.samples),
                    sample_rate: c.sample_rate,
                    chunk_ms: c.chunk_ms,
                    overlap_ms: c.overlap_ms,
                })
                .collect())
        }
        ProviderRequest::Generate { query, passages, .. } => {
            let results: Vec<RetrievalResult> = passages
                .into_iter()
                .enumerate()
                .map(|(i, p)| RetrievalResult {
                    chunk: KnowledgeChunk::corpus(p.chunk_id, p.text, p.domain, &embedder),
                    similarity: 0.0,
                    rerank_score: p.rerank_score,
                    rank: i + 1,
                })
                .collect();
            let deltas = rt
                .block_on(generator.generate(&query, &[], &results))
                .map_err(|e| e.to_string())?;
            Ok(deltas.into_iter().map(|text| ProviderReply::Delta { text }).collect())
        }
        ProviderRequest::Embed { text } => Ok(vec![ProviderReply::Embedding {
            values: embedder.embed(&text).values().to_vec(),
        }]),
        ProviderRequest::Rerank { query, candidates } => {
            let q = embedder.embed(&query);
            let scores = candidates
                .iter()
                .map(|c| cosine(&q, &embedder.embed(&c.text)).map(|s| RERANK_SCALE * s))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| e.to_string())?;
            Ok(vec![ProviderReply::Scores { scores }])
        }
    })?;
    Ok(())
}
