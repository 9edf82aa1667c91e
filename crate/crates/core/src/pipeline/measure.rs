use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{PipelineConfig, SynthesisMode};
use super::events::NullSink;
use super::ports::{FixedAnswer, NoKnowledge, Ports};
use super::turn::{run_turn, TurnPlan};
use super::PipelineError;
use crate::avatar::{MotionLibrary, RmsExpressionDriver};
use crate::clock::{Clock, SimClock};
use crate::embedding::HashedBagOfWords;
use crate::speech::MockTts;
use crate::types::SessionId;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TtfaMeasurement {
    pub answer_chars: usize,
    pub segmented_ttfa_ms: u64,
    pub non_segmented_ttfa_ms: u64,
    /// `100 * (1 - segmented / non_segmented)`.
    pub reduction_pct: f64,
    pub segmented: TurnPlan,
    pub non_segmented: TurnPlan,
}

/// Runs the same answer through both synthesis modes on simulated time.
///
/// Must not be called from inside a tokio runtime.
pub fn measure_ttfa(config: &PipelineConfig, answer: &str) -> Result<TtfaMeasurement, PipelineError> {
    let segmented = simulate(config, SynthesisMode::Segmented, answer)?;
    let non_segmented = simulate(config, SynthesisMode::NonSegmented, answer)?;
    let seg = segmented.ttfa_ms.unwrap_or(0);
    let whole = non_segmented.ttfa_ms.unwrap_or(0);
    let reduction_pct = if whole == 0 {
        0.0
    } else {
        100.0 * (1.0 - seg as f64 / whole as f64)
    };
    Ok(TtfaMeasurement {
        answer_chars: answer.chars().count(),
        segmented_ttfa_ms: seg,
        non_segmented_ttfa_ms: whole,
        reduction_pct,
        segmented,
        non_segmented,
    })
}

fn simulate(config: &PipelineConfig, mode: SynthesisMode, answer: &str) -> Result<TurnPlan, PipelineError> {
    let config = PipelineConfig {
        mode,
        ..config.clone()
    };
    SimClock::run(async {
        let clock: Arc<dyn Clock> = Arc::new(SimClock::new());
        let embedder = Arc::new(HashedBagOfWords::default());
        let ports = Ports {
            knowledge: Arc::new(NoKnowledge),
            generator: Arc::new(FixedAnswer(answer.to_owned())),
            tts: Arc::new(MockTts::new(config.mock_tts, clock.clone())),
            expression: Arc::new(RmsExpressionDriver::default()),
            motions: Arc::new(MotionLibrary::builtin(embedder.as_ref())),
            embedder,
            clock,
        };
        run_turn(&SessionId::from("ttfa"), 0, "ttfa", &[], &config, &ports, &NullSink).await
    })
}

const WORDS: &[&str] = &[
    "the", "museum", "opens", "early", "on", "weekdays", "and", "visitors", "can", "book", "guided",
    "tours", "at", "front", "desk", "library", "offers", "quiet", "rooms", "for", "study", "cafe",
    "serves", "lunch", "until", "three", "parking", "is", "free", "after", "six", "staff", "will",
    "help", "you", "find", "exhibits", "maps", "are", "available", "near", "entrance", "tickets",
];

/// Deterministic prose of exactly `chars` characters made of sentences of
/// 40 to 60 characters each.
pub fn synthetic_answer(chars: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lengths = Vec::new();
    let mut rem = chars;
    while rem > 120 {
        let l = rng.random_range(40..=60);
        lengths.push(l);
        rem -= l;
    }
    if rem > 60 {
        lengths.push(rem / 2);
        lengths.push(rem - rem / 2);
    } else if rem > 0 {
        lengths.push(rem);
    }
    let mut out = String::with_capacity(chars);
    for (i, len) in lengths.into_iter().enumerate() {
        let lead = usize::from(i > 0);
        if lead == 1 {
            out.push(' ');
        }
        let body_len = len.saturating_sub(1 + lead);
        out.push_str(&sentence_body(&mut rng, body_len));
        if len > lead {
            out.push('.');
        }
    }
    out
}

fn sentence_body(rng: &mut ChaCha8Rng, target: usize) -> String {
    let mut s = String::with_capacity(target);
    while s.len() < target {
        if !s.is_empty() {
            if target - s.len() == 1 {
                s.push('s');
                break;
            }
            s.push(' ');
        }
        let room = target - s.len();
        let word = WORDS[rng.random_range(0..WORDS.len())];
        s.push_str(&word[..word.len().min(room)]);
    }
    if let Some(first) = s.get(..1) {
        let upper = first.to_ascii_uppercase();
        s.replace_range(..1, &upper);
    }
    s
}
