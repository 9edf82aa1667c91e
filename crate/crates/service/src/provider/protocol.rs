use std::io::{BufRead, Write};

use base64::Engine as _;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub role: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Passage {
    pub chunk_id: String,
    pub domain: String,
    pub text: String,
    pub rerank_score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub chunk_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ProviderRequest {
    Synthesize {
        text: String,
        voice_id: String,
        sample_rate: u32,
    },
    Generate {
        query: String,
        history: Vec<HistoryEntry>,
        passages: Vec<Passage>,
    },
    Embed {
        text: String,
    },
    Rerank {
        query: String,
        candidates: Vec<Candidate>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ProviderReply {
    AudioChunk {
        pcm_b64: String,
        sample_rate: u32,
        chunk_ms: u32,
        overlap_ms: u32,
    },
    Delta {
        text: String,
    },
    Embedding {
        values: Vec<f32>,
    },
    Scores {
        scores: Vec<f64>,
    },
    End,
    Error {
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestEnvelope {
    pub id: u64,
    #[serde(flatten)]
    pub request: ProviderRequest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplyEnvelope {
    pub id: u64,
    #[serde(flatten)]
    pub reply: ProviderReply,
}

pub fn encode_pcm(samples: &[i16]) -> String {
    let bytes: Vec<u8> = samples.iter().flat_map(|s| s.to_le_bytes()).collect();
    base64::engine::general_purpose::STANDARD.encode(bytes)
}

pub fn decode_pcm(b64: &str) -> Result<Vec<i16>, String> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(b64)
        .map_err(|e| format!("bad base64: {e}"))?;
    if bytes.len() % 2 != 0 {
        return Err("odd PCM byte count".into());
    }
    Ok(bytes
        .chunks_exact(2)
        .map(|b| i16::from_le_bytes([b[0], b[1]]))
        .collect())
}

/// Provider side of the protocol: answers requests read from `input` until
/// it closes. `handler` returns the data lines; `end` or `error` is added.
pub fn serve_lines<R, W, F>(input: R, mut output: W, mut handler: F) -> std::io::Result<()>
where
    R: BufRead,
    W: Write,
    F: FnMut(ProviderRequest) -> Result<Vec<ProviderReply>, String>,
{
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (id, replies) = match serde_json::from_str::<RequestEnvelope>(&line) {
            Ok(env) => match handler(env.request) {
                Ok(mut r) => {
                    r.push(ProviderReply::End);
                    (env.id, r)
                }
                Err(message) => (env.id, vec![ProviderReply::Error { message }]),
            },
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id").and_then(serde_json::Value::as_u64))
                    .unwrap_or(0);
                (id, vec![ProviderReply::Error { message: format!("bad request: {e}") }])
            }
        };
        for reply in replies {
            serde_json::to_writer(&mut output, &ReplyEnvelope { id, reply })?;
            output.write_all(b"\n")?;
        }
        output.flush()?;
    }
    Ok(())
}
