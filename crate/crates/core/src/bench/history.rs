use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Aggregates, BenchReport, Comparison};
use super::synth::{function_words, PseudoWords};
use crate::embedding::{EmbeddingProvider, HashedBagOfWords};
use crate::retrieval::{KnowledgeBase, KnowledgeChunk, Origin, RetrievalConfig, RetrievalError, RetrievalResult};
use crate::types::SessionId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HistoryBenchConfig {
    pub turns: usize,
    pub seed: u64,
    /// When false the dynamic run gets no history, as a control.
    pub augment: bool,
    pub domains: usize,
    pub chunks_per_domain: usize,
    pub top_k: usize,
    pub embedding_dim: usize,
}

impl Default for HistoryBenchConfig {
    fn default() -> Self {
        Self {
            turns: 10,
            seed: 0,
            augment: true,
            domains: 3,
            chunks_per_domain: 100,
            top_k: 3,
            embedding_dim: 4096,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryTurn {
    pub question: String,
    pub answer: String,
    /// Refers back to the answer by ellipsis; its content words occur only
    /// in the answer.
    pub follow_up: String,
}

/// A base corpus plus a scripted session.
#[derive(Debug, Clone)]
pub struct HistorySuite {
    /// `(id, domain, text)`.
    pub corpus: Vec<(String, String, String)>,
    pub turns: Vec<HistoryTurn>,
}

const QUESTIONS: &[&str] = &["tell me about the {t}", "where is the {t}", "can you describe the {t}"];
const ANSWERS: &[&str] = &[
    "The {t} is known for its {a} {b} and {c}.",
    "The {t} offers its {a} {b} {c} to everyone.",
    "Visitors love the {t} because of its {a} {b} {c}.",
];
const FOLLOW_UPS: &[&str] = &[
    "what about its {a} {b} {c}",
    "and the {a} {b} {c}",
    "how about that {a} {b} {c}",
];

impl HistorySuite {
    pub fn generate(config: &HistoryBenchConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut words = PseudoWords::new();
        let mut corpus = Vec::new();
        for d in 0..config.domains {
            let domain = format!("domain{d}");
            let vocab = words.take(&mut rng, 200);
            for i in 0..config.chunks_per_domain {
                let mut tokens: Vec<&str> = (0..40).map(|_| vocab.choose(&mut rng).expect("non-empty").as_str()).collect();
                tokens.extend((0..2).map(|_| *function_words().choose(&mut rng).expect("non-empty")));
                corpus.push((format!("{domain}-{i:04}"), domain.clone(), tokens.join(" ")));
            }
        }
        let fill = |template: &str, w: &[String; 4]| {
            template
                .replace("{t}", &w[0])
                .replace("{a}", &w[1])
                .replace("{b}", &w[2])
                .replace("{c}", &w[3])
        };
        let turns = (0..config.turns)
            .map(|_| {
                let w: [String; 4] = std::array::from_fn(|_| words.next(&mut rng));
                HistoryTurn {
                    question: fill(QUESTIONS.choose(&mut rng).expect("non-empty"), &w),
                    answer: fill(ANSWERS.choose(&mut rng).expect("non-empty"), &w),
                    follow_up: fill(FOLLOW_UPS.choose(&mut rng).expect("non-empty"), &w),
                }
            })
            .collect();
        Self { corpus, turns }
    }

    pub fn knowledge_base(&self, provider: Arc<dyn EmbeddingProvider>) -> Result<KnowledgeBase, RetrievalError> {
        let kb = KnowledgeBase::new(
            provider.clone(),
            RetrievalConfig {
                routing: false,
                ..RetrievalConfig::default()
            },
        );
        let mut by_domain: BTreeMap<&str, Vec<KnowledgeChunk>> = BTreeMap::new();
        for (id, domain, text) in &self.corpus {
            by_domain
                .entry(domain)
                .or_default()
                .push(KnowledgeChunk::corpus(id.clone(), text.clone(), domain.clone(), provider.as_ref()));
        }
        for (domain, chunks) in by_domain {
            kb.upsert_chunks(domain, chunks)?;
        }
        Ok(kb)
    }
}

/// Corpus-only versus history-augmented top-1 rerank score on follow-ups.
///
/// Turn `i`'s follow-up is asked after turns `0..=i` have been recorded.
pub fn bench_history(config: &HistoryBenchConfig) -> Result<BenchReport, RetrievalError> {
    let provider: Arc<dyn EmbeddingProvider> =
        Arc::new(HashedBagOfWords::new(config.embedding_dim).map_err(RetrievalError::Core)?);
    let suite = HistorySuite::generate(config);
    let kb = suite.knowledge_base(provider)?;
    let static_session = SessionId::from("bench-history-static");
    let dynamic_session = SessionId::from("bench-history-dynamic");
    let top1 = |r: &[RetrievalResult]| r.first().map(|x| (x.chunk.id.clone(), x.rerank_score, x.chunk.origin));

    let mut trials = Vec::with_capacity(suite.turns.len());
    let (mut static_scores, mut dynamic_scores) = (Vec::new(), Vec::new());
    let mut strictly_greater = 0usize;
    for (i, turn) in suite.turns.iter().enumerate() {
        if config.augment {
            kb.add_history(&dynamic_session, &turn.question, &turn.answer)?;
        }
        let s = kb.retrieve(&static_session, &turn.follow_up, config.top_k)?;
        let d = kb.retrieve(&dynamic_session, &turn.follow_up, config.top_k)?;
        let (s_id, s_score, _) = top1(&s.results).unwrap_or_default_tuple();
        let (d_id, d_score, d_origin) = top1(&d.results).unwrap_or_default_tuple();
        strictly_greater += usize::from(d_score > s_score);
        static_scores.push(s_score);
        dynamic_scores.push(d_score);
        trials.push(json!({
            "turn": i,
            "follow_up": turn.follow_up,
            "static_top1": s_id,
            "static_top1_score": s_score,
            "dynamic_top1": d_id,
            "dynamic_top1_score": d_score,
            "dynamic_top1_from_history": d_origin == Origin::History,
        }));
    }

    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let comparison = Comparison::new(
        "mean_top1_rerank_score",
        "static",
        "dynamic",
        mean(&static_scores),
        mean(&dynamic_scores),
    );
    let mut aggregates = BTreeMap::new();
    if let Some(a) = Aggregates::of(&static_scores) {
        aggregates.insert("top1_score.static".to_owned(), a);
    }
    if let Some(a) = Aggregates::of(&dynamic_scores) {
        aggregates.insert("top1_score.dynamic".to_owned(), a);
    }
    let mut metrics = BTreeMap::new();
    metrics.insert("relative_improvement_pct".to_owned(), comparison.delta_pct);
    metrics.insert("strictly_greater".to_owned(), strictly_greater as f64);
    metrics.insert("follow_ups".to_owned(), suite.turns.len() as f64);
    metrics.insert("history_chunks".to_owned(), kb.history_len(&dynamic_session) as f64);
    Ok(BenchReport {
        experiment: "history".to_owned(),
        seed: config.seed,
        config: serde_json::to_value(config).expect("config is serializable"),
        trials,
        aggregates,
        comparison,
        metrics,
    })
}

trait OrDefaultTuple {
    fn unwrap_or_default_tuple(self) -> (Option<String>, f64, Origin);
}

impl OrDefaultTuple for Option<(String, f64, Origin)> {
    fn unwrap_or_default_tuple(self) -> (Option<String>, f64, Origin) {
        match self {
            Some((id, score, origin)) => (Some(id), score, origin),
            None => (None, 0.0, Origin::Corpus),
        }
    }
}
