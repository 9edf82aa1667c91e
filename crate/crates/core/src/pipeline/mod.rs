//! Turn orchestration.
//!
//! A turn runs retrieval and generation, splits the answer into segments
//! and then drives two lanes joined by a bounded queue: the synthesis lane
//! renders segments in order and the playback lane plays them back in
//! order, emitting expression frames on the audio clock. In segmented mode
//! segment `k + 1` is synthesized while segment `k` plays.

mod config;
mod events;
mod measure;
mod ports;
mod turn;

pub use config::{PipelineConfig, SynthesisMode};
pub use events::{CollectingSink, NullSink, PipelineEvent, RetrievalHit, TurnSink};
pub use measure::{measure_ttfa, synthetic_answer, TtfaMeasurement};
pub use ports::{FixedAnswer, KnowledgePort, NoKnowledge, Ports};
pub use turn::{playback_clock_events, run_turn, segment_ticks, PlaybackEvent, SegmentRecord, StallEvent, TurnPlan};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("turn aborted: {reason}")]
    TurnAborted { reason: String, partial: Box<TurnPlan> },
    #[error("invalid pipeline configuration: {0}")]
    Config(String),
}
