//! Line-delimited JSON protocol for external backends.
//!
//! The service writes one request object per line and reads reply lines
//! carrying the same `id` until an `end` or `error` line. A connection
//! carries one request at a time.
//!
//! ```text
//! > {"id":1,"op":"synthesize","text":"Hello.","voice_id":"default","sample_rate":16000}
//! < {"id":1,"type":"audio_chunk","pcm_b64":"...","sample_rate":16000,"chunk_ms":150,"overlap_ms":20}
//! < {"id":1,"type":"end"}
//! ```

mod adapters;
mod client;
mod protocol;

pub use adapters::{RemoteEmbedding, RemoteGenerator, RemoteReranker, RemoteTts};
pub use client::{ProviderClient, ProviderError};
pub use protocol::{
    decode_pcm, encode_pcm, serve_lines, Candidate, HistoryEntry, Passage, ProviderReply, ProviderRequest,
    ReplyEnvelope, RequestEnvelope,
};
