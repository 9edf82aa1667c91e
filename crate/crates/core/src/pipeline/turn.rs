use serde::Serialize;
use tokio::sync::mpsc;

use super::config::{PipelineConfig, SynthesisMode};
use super::events::{PipelineEvent, RetrievalHit, TurnSink};
use super::ports::Ports;
use super::PipelineError;
use crate::avatar::ExpressionFrame;
use crate::retrieval::RetrievalError;
use crate::speech::{split_response, synthesize, AudioSegment, TextSegment};
use crate::sync::{frame_count, frame_index, frame_start_ms, SyncState};
use crate::types::{DialogueTurn, SessionId};

/// Timing record of one segment. All times are milliseconds since the
/// query was accepted; `audio_start_ms` is on the turn's audio timeline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentRecord {
    pub seq: usize,
    pub text: String,
    pub char_count: usize,
    pub audio_start_ms: u64,
    pub duration_ms: u64,
    pub synth_start_ms: u64,
    pub synth_done_ms: u64,
    pub playback_start_ms: u64,
    pub playback_end_ms: u64,
}

/// Playback waited for synthesis between two segments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StallEvent {
    pub before_seq: usize,
    pub gap_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurnPlan {
    pub turn_id: u64,
    pub mode: SynthesisMode,
    pub query: String,
    pub answer_text: String,
    pub routed_domain: Option<String>,
    pub answer_ready_ms: Option<u64>,
    pub segments: Vec<SegmentRecord>,
    pub selected_motion: Option<String>,
    pub motion_score: Option<f64>,
    pub stalls: Vec<StallEvent>,
    /// Playback start of the first segment.
    pub ttfa_ms: Option<u64>,
    pub total_audio_ms: u64,
    pub completed_ms: u64,
}

impl TurnPlan {
    fn new(turn_id: u64, mode: SynthesisMode, query: &str) -> Self {
        Self {
            turn_id,
            mode,
            query: query.to_owned(),
            answer_text: String::new(),
            routed_domain: None,
            answer_ready_ms: None,
            segments: Vec::new(),
            selected_motion: None,
            motion_score: None,
            stalls: Vec::new(),
            ttfa_ms: None,
            total_audio_ms: 0,
            completed_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PlaybackEvent {
    pub seq: usize,
    pub audio_timestamp_ms: u64,
    pub frame_index: u64,
}

/// Ticks whose frame start falls inside `[start_ms, start_ms + duration_ms)`.
pub fn segment_ticks(seq: usize, start_ms: u64, duration_ms: u64, fps: u32) -> impl Iterator<Item = PlaybackEvent> {
    let first = frame_count(start_ms, fps);
    let end = frame_count(start_ms + duration_ms, fps);
    (first..end).map(move |j| PlaybackEvent {
        seq,
        audio_timestamp_ms: frame_start_ms(j, fps),
        frame_index: j,
    })
}

/// The playback ticks of a finished plan, one per visual frame of audio.
pub fn playback_clock_events(plan: &TurnPlan, fps: u32) -> Vec<PlaybackEvent> {
    plan.segments
        .iter()
        .flat_map(|s| segment_ticks(s.seq, s.audio_start_ms, s.duration_ms, fps))
        .collect()
}

struct Synthesized {
    audio: AudioSegment,
    synth_start_ms: u64,
    synth_done_ms: u64,
}

struct PlaybackOutcome {
    segments: Vec<SegmentRecord>,
    stalls: Vec<StallEvent>,
    error: Option<String>,
}

/// Runs one dialogue turn end to end and returns its timing plan.
///
/// Events reach `sink` in protocol order. On failure the sink receives an
/// `Error` and an aborted `TurnEnd`, and the error carries the partial plan.
pub async fn run_turn(
    session: &SessionId,
    turn_id: u64,
    query: &str,
    history: &[DialogueTurn],
    config: &PipelineConfig,
    ports: &Ports,
    sink: &dyn TurnSink,
) -> Result<TurnPlan, PipelineError> {
    config.validate().map_err(PipelineError::Config)?;
    let clock = ports.clock.as_ref();
    let t0 = clock.now_ms();
    let rel = |t: u64| t.saturating_sub(t0);
    let mut plan = TurnPlan::new(turn_id, config.mode, query);

    let abort = |mut plan: TurnPlan, reason: String| {
        plan.completed_ms = rel(clock.now_ms());
        sink.emit(PipelineEvent::Error { message: reason.clone() });
        sink.emit(PipelineEvent::TurnEnd {
            turn_id,
            ttfa_ms: plan.ttfa_ms,
            aborted: true,
        });
        PipelineError::TurnAborted {
            reason,
            partial: Box::new(plan),
        }
    };

    let outcome = match ports.knowledge.retrieve(session, query).await {
        Ok(o) => Some(o),
        Err(RetrievalError::EmptyCorpus) => None,
        Err(e) => return Err(abort(plan, format!("retrieval failed: {e}"))),
    };
    clock.sleep_ms(config.retrieval_overhead_ms).await;
    let passages = outcome.as_ref().map(|o| o.results.clone()).unwrap_or_default();
    plan.routed_domain = outcome.as_ref().and_then(|o| o.routed_domain.clone());
    sink.emit(PipelineEvent::RetrievalDebug {
        routed_domain: plan.routed_domain.clone(),
        results: passages
            .iter()
            .map(|r| RetrievalHit {
                chunk_id: r.chunk.id.clone(),
                similarity: r.similarity,
                rerank_score: r.rerank_score,
            })
            .collect(),
    });

    let deltas = match ports.generator.generate(query, history, &passages).await {
        Ok(d) => d,
        Err(e) => return Err(abort(plan, format!("generation failed: {e}"))),
    };
    clock.sleep_ms(config.generation_overhead_ms).await;
    for text in &deltas {
        sink.emit(PipelineEvent::ResponseDelta { text: text.clone() });
    }
    plan.answer_text = deltas.concat();
    plan.answer_ready_ms = Some(rel(clock.now_ms()));
    if plan.answer_text.trim().is_empty() {
        return Err(abort(plan, "generator returned an empty answer".into()));
    }

    let segments = match config.mode {
        SynthesisMode::Segmented => match split_response(&plan.answer_text, config.min_chars, config.max_chars) {
            Ok(s) => s,
            Err(e) => return Err(abort(plan, format!("segmentation failed: {e}"))),
        },
        SynthesisMode::NonSegmented => vec![TextSegment::new(plan.answer_text.clone(), 0)],
    };

    match ports.motions.select(&plan.answer_text, ports.embedder.as_ref()) {
        Ok(sel) => {
            plan.selected_motion = Some(sel.clip.id.clone());
            plan.motion_score = Some(sel.score);
        }
        Err(e) => return Err(abort(plan, format!("motion selection failed: {e}"))),
    }

    let (tx, mut rx) = mpsc::channel::<Synthesized>(config.queue_capacity);

    let synthesis = async {
        for segment in &segments {
            let started = clock.now_ms();
            let audio = synthesize(
                ports.tts.as_ref(),
                segment,
                &config.voice_id,
                config.sample_rate,
                0,
            )
            .await
            .map_err(|e| format!("synthesis of segment {} failed: {e}", segment.seq))?;
            let item = Synthesized {
                audio,
                synth_start_ms: rel(started),
                synth_done_ms: rel(clock.now_ms()),
            };
            if tx.send(item).await.is_err() {
                // Playback gave up; its error wins.
                break;
            }
        }
        drop(tx);
        Ok::<(), String>(())
    };

    let playback = async {
        let mut out = PlaybackOutcome {
            segments: Vec::new(),
            stalls: Vec::new(),
            error: None,
        };
        let mut audio_cursor = 0u64;
        let mut prev_end: Option<u64> = None;
        while let Some(item) = rx.recv().await {
            let mut audio = item.audio;
            audio.start_ms = audio_cursor;
            let duration = audio.duration_ms();
            let frames = match ports.expression.drive(&audio, config.fps) {
                Ok(f) => f,
                Err(e) => {
                    out.error = Some(format!("expression driver failed on segment {}: {e}", audio.seq));
                    break;
                }
            };
            let start = clock.now_ms();
            if let Some(end) = prev_end {
                if start > end {
                    out.stalls.push(StallEvent {
                        before_seq: audio.seq,
                        gap_ms: start - end,
                    });
                }
            }
            let seq = audio.seq;
            let record = SegmentRecord {
                seq,
                text: audio.source.text.clone(),
                char_count: audio.source.char_count,
                audio_start_ms: audio_cursor,
                duration_ms: duration,
                synth_start_ms: item.synth_start_ms,
                synth_done_ms: item.synth_done_ms,
                playback_start_ms: rel(start),
                playback_end_ms: rel(start) + duration,
            };
            sink.emit(PipelineEvent::AudioSegment(audio));
            sink.emit(PipelineEvent::ExpressionFrames {
                seq,
                fps: config.fps,
                frames: frames.clone(),
            });
            for tick in segment_ticks(seq, audio_cursor, duration, config.fps) {
                clock.sleep_until(start + (tick.audio_timestamp_ms - audio_cursor)).await;
                let local = frame_index(SyncState {
                    audio_timestamp_ms: tick.audio_timestamp_ms - audio_cursor,
                    fps: config.fps,
                });
                let params = frames
                    .get(local as usize)
                    .or(frames.last())
                    .map(|f| f.params.clone())
                    .unwrap_or_default();
                sink.emit(PipelineEvent::PlaybackSync {
                    seq,
                    audio_timestamp_ms: tick.audio_timestamp_ms,
                    frame_index: tick.frame_index,
                    expression: ExpressionFrame {
                        params,
                        frame: tick.frame_index,
                    },
                });
            }
            clock.sleep_until(start + duration).await;
            prev_end = Some(start + duration);
            audio_cursor += duration;
            out.segments.push(record);
        }
        out
    };

    let (synth_result, played) = tokio::join!(synthesis, playback);
    plan.ttfa_ms = played.segments.first().map(|s| s.playback_start_ms);
    plan.total_audio_ms = played.segments.iter().map(|s| s.duration_ms).sum();
    plan.segments = played.segments;
    plan.stalls = played.stalls;
    if let Some(reason) = played.error {
        return Err(abort(plan, reason));
    }
    if let Err(reason) = synth_result {
        return Err(abort(plan, reason));
    }

    if let (Some(clip_id), Some(score)) = (plan.selected_motion.clone(), plan.motion_score) {
        sink.emit(PipelineEvent::MotionSelected { clip_id, score });
    }
    if let Err(e) = ports.knowledge.record_turn(session, query, &plan.answer_text).await {
        return Err(abort(plan, format!("history update failed: {e}")));
    }
    plan.completed_ms = rel(clock.now_ms());
    sink.emit(PipelineEvent::TurnEnd {
        turn_id,
        ttfa_ms: plan.ttfa_ms,
        aborted: false,
    });
    Ok(plan)
}
