use std::sync::Arc;

use talkhead_core::avatar::{MotionLibrary, RmsExpressionDriver};
use talkhead_core::pipeline::{
    run_turn, synthetic_answer, CollectingSink, FixedAnswer, NoKnowledge, PipelineConfig, PipelineEvent, Ports,
    TurnPlan,
};
use talkhead_core::speech::MockTts;
use talkhead_core::{Clock, HashedBagOfWords, SessionId, SimClock};

use crate::{ensure, Outcome};

fn simulate(answer: &str, config: &PipelineConfig) -> Result<(TurnPlan, Vec<PipelineEvent>), String> {
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
        let sink = CollectingSink::new();
        let plan = run_turn(&SessionId::from("acceptance"), 1, "question", &[], config, &ports, &sink)
            .await
            .map_err(|e| e.to_string())?;
        Ok((plan, sink.take()))
    })
}

pub fn ordering() -> Outcome {
    let config = PipelineConfig::default();
    let mut overlapping = 0;
    for (i, chars) in [120usize, 250, 400, 800].into_iter().enumerate() {
        let answer = synthetic_answer(chars, i as u64);
        let (plan, events) = simulate(&answer, &config)?;
        let (again, events_again) = simulate(&answer, &config)?;
        let dump = |p: &TurnPlan| serde_json::to_string(p).unwrap_or_default();
        ensure!(dump(&plan) == dump(&again) && events == events_again, "{chars} chars: reruns differ");
        ensure!(plan.segments.len() >= 2, "{chars} chars gave one segment");
        ensure!(plan.stalls.is_empty(), "{chars} chars: stalls {:?}", plan.stalls);
        for w in plan.segments.windows(2) {
            ensure!(w[1].seq == w[0].seq + 1, "segments out of order");
            ensure!(w[1].playback_start_ms == w[0].playback_end_ms, "gap before segment {}", w[1].seq);
        }
        for s in &plan.segments {
            ensure!(s.playback_start_ms >= s.synth_done_ms, "segment {} played before synthesis", s.seq);
        }
        if plan.segments[1].synth_start_ms < plan.segments[0].playback_end_ms {
            overlapping += 1;
        }
        let audio: Vec<usize> = events
            .iter()
            .filter_map(|e| match e {
                PipelineEvent::AudioSegment(a) => Some(a.seq),
                _ => None,
            })
            .collect();
        ensure!(audio == (0..plan.segments.len()).collect::<Vec<_>>(), "audio emitted as {audio:?}");
    }
    ensure!(overlapping == 4, "synthesis overlapped playback in {overlapping}/4 turns");
    Ok("4 answers: gapless, ordered, overlapped, deterministic".to_owned())
}
