//! Conversational avatar engine.
//!
//! The crate is organized by pipeline stage:
//!
//! - [`types`], [`embedding`], [`sync`]: shared domain types, the hashed
//!   bag-of-words embedding provider, vector math and the audio-clock to
//!   visual-frame mapping.
//! - [`speech`]: answer segmentation, the TTS backend contract with a mock
//!   backend, overlap-add reconstruction and the wake-word gate.
//! - [`avatar`]: motion-clip selection and speech-driven expression frames.
//! - [`retrieval`]: chunking, per-domain flat indexes, intent routing,
//!   session history augmentation, reranking and the generator contract.
//! - [`pipeline`]: the turn orchestrator with synthesis and playback lanes.
//! - [`bench`]: reproducible latency/retrieval experiments.

pub mod avatar;
pub mod bench;
pub mod clock;
pub mod embedding;
pub mod pipeline;
pub mod retrieval;
pub mod speech;
pub mod sync;
pub mod types;

pub use clock::{Clock, SimClock, SystemClock};
pub use embedding::{cosine, embed_text, Embedding, EmbeddingProvider, HashedBagOfWords};
pub use sync::{frame_index, SyncState};
pub use types::{CoreError, DialogueTurn, Role, SessionId};
