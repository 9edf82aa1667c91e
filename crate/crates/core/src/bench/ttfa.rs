use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Aggregates, BenchReport, Comparison};
use crate::pipeline::{measure_ttfa, synthetic_answer, PipelineConfig, PipelineError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TtfaBenchConfig {
    pub chars: usize,
    pub seed: u64,
    pub pipeline: PipelineConfig,
}

impl Default for TtfaBenchConfig {
    fn default() -> Self {
        Self {
            chars: 400,
            seed: 0,
            pipeline: PipelineConfig::default(),
        }
    }
}

/// Segmented versus whole-answer time to first audio on simulated time.
pub fn bench_ttfa(config: &TtfaBenchConfig) -> Result<BenchReport, PipelineError> {
    let answer = synthetic_answer(config.chars, config.seed);
    let m = measure_ttfa(&config.pipeline, &answer)?;
    let trial = |label: &str, plan: &crate::pipeline::TurnPlan| {
        json!({
            "mode": label,
            "ttfa_ms": plan.ttfa_ms,
            "segments": plan.segments.len(),
            "first_segment_chars": plan.segments.first().map(|s| s.char_count),
            "total_audio_ms": plan.total_audio_ms,
            "completed_ms": plan.completed_ms,
            "stalls": plan.stalls.len(),
        })
    };
    let mut aggregates = BTreeMap::new();
    let seg_ttfa: Vec<f64> = vec![m.segmented_ttfa_ms as f64];
    let whole_ttfa: Vec<f64> = vec![m.non_segmented_ttfa_ms as f64];
    aggregates.insert("ttfa_ms.non_segmented".to_owned(), Aggregates::of(&whole_ttfa).expect("one trial"));
    aggregates.insert("ttfa_ms.segmented".to_owned(), Aggregates::of(&seg_ttfa).expect("one trial"));
    let segment_chars: Vec<f64> = m.segmented.segments.iter().map(|s| s.char_count as f64).collect();
    if let Some(a) = Aggregates::of(&segment_chars) {
        aggregates.insert("segment_chars".to_owned(), a);
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("reduction_pct".to_owned(), m.reduction_pct);
    metrics.insert("segments".to_owned(), m.segmented.segments.len() as f64);
    metrics.insert("stalls".to_owned(), m.segmented.stalls.len() as f64);
    Ok(BenchReport {
        experiment: "ttfa".to_owned(),
        seed: config.seed,
        config: serde_json::to_value(config).expect("config is serializable"),
        trials: vec![trial("non_segmented", &m.non_segmented), trial("segmented", &m.segmented)],
        aggregates,
        comparison: Comparison::new(
            "ttfa_ms",
            "non_segmented",
            "segmented",
            m.non_segmented_ttfa_ms as f64,
            m.segmented_ttfa_ms as f64,
        ),
        metrics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn short_answer_gains_nothing() {
        let r = bench_ttfa(&TtfaBenchConfig {
            chars: 30,
            ..TtfaBenchConfig::default()
        })
        .unwrap();
        assert_eq!(r.metric("segments"), Some(1.0));
        assert_eq!(r.metric("reduction_pct"), Some(0.0));
    }

    #[test]
    fn report_is_reproducible() {
        let c = TtfaBenchConfig::default();
        assert_eq!(bench_ttfa(&c).unwrap().to_json(), bench_ttfa(&c).unwrap().to_json());
    }
}
