use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::report::{Aggregates, BenchReport, Comparison};
use super::synth::PseudoWords;
use crate::embedding::{EmbeddingProvider, HashedBagOfWords};
use crate::retrieval::{KnowledgeBase, KnowledgeChunk, RetrievalConfig, RetrievalError, RetrievalOutcome};
use crate::types::SessionId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RoutingBenchConfig {
    pub chunks: usize,
    pub domains: usize,
    pub queries: usize,
    pub seed: u64,
    /// Timed repetitions; latencies are medians over them.
    pub repetitions: usize,
    pub vocabulary_per_domain: usize,
    pub tokens_per_chunk: usize,
    pub tokens_per_query: usize,
    pub top_k: usize,
    pub embedding_dim: usize,
}

impl Default for RoutingBenchConfig {
    fn default() -> Self {
        Self {
            chunks: 100_000,
            domains: 5,
            queries: 500,
            seed: 0,
            repetitions: 5,
            vocabulary_per_domain: 200,
            tokens_per_chunk: 30,
            tokens_per_query: 8,
            top_k: 3,
            embedding_dim: crate::embedding::DEFAULT_DIMENSION,
        }
    }
}

/// Seeded corpus over disjoint per-domain vocabularies, with queries drawn
/// from known chunks so the intended domain is known.
#[derive(Debug, Clone)]
pub struct RoutingCorpus {
    pub domains: Vec<String>,
    /// `(id, domain index, text)`; chunks are spread evenly over domains.
    pub chunks: Vec<(String, usize, String)>,
    /// `(text, oracle domain index, source chunk index)`.
    pub queries: Vec<(String, usize, usize)>,
}

impl RoutingCorpus {
    pub fn generate(config: &RoutingBenchConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut words = PseudoWords::new();
        let domains: Vec<String> = (0..config.domains).map(|d| format!("domain{d}")).collect();
        let vocab: Vec<Vec<String>> = (0..config.domains)
            .map(|_| words.take(&mut rng, config.vocabulary_per_domain))
            .collect();
        let chunks: Vec<(String, usize, String)> = (0..config.chunks)
            .map(|i| {
                let d = i % config.domains.max(1);
                let text = (0..config.tokens_per_chunk)
                    .map(|_| vocab[d].choose(&mut rng).expect("vocabulary is non-empty").as_str())
                    .collect::<Vec<_>>()
                    .join(" ");
                (format!("{}-{i:06}", domains[d]), d, text)
            })
            .collect();
        let queries = if chunks.is_empty() {
            Vec::new()
        } else {
            (0..config.queries)
                .map(|_| {
                    let src = rng.random_range(0..chunks.len());
                    let mut tokens: Vec<&str> = chunks[src].2.split(' ').collect();
                    tokens.shuffle(&mut rng);
                    tokens.truncate(config.tokens_per_query.max(1));
                    (tokens.join(" "), chunks[src].1, src)
                })
                .collect()
        };
        Self { domains, chunks, queries }
    }

    pub fn knowledge_base(&self, provider: Arc<dyn EmbeddingProvider>) -> Result<KnowledgeBase, RetrievalError> {
        let kb = KnowledgeBase::new(provider.clone(), RetrievalConfig::default());
        let mut per_domain: Vec<Vec<KnowledgeChunk>> = vec![Vec::new(); self.domains.len()];
        for (id, d, text) in &self.chunks {
            per_domain[*d].push(KnowledgeChunk::corpus(id.clone(), text.clone(), self.domains[*d].clone(), provider.as_ref()));
        }
        for (d, chunks) in per_domain.into_iter().enumerate() {
            kb.upsert_chunks(&self.domains[d], chunks)?;
        }
        Ok(kb)
    }
}

fn timed_pass(
    kb: &KnowledgeBase,
    session: &SessionId,
    corpus: &RoutingCorpus,
    k: usize,
    routing: bool,
) -> Result<(Vec<f64>, Vec<RetrievalOutcome>), RetrievalError> {
    let mut latencies = Vec::with_capacity(corpus.queries.len());
    let mut outcomes = Vec::with_capacity(corpus.queries.len());
    for (q, _, _) in &corpus.queries {
        let start = Instant::now();
        let out = kb.retrieve_with(session, q, k, routing)?;
        latencies.push(start.elapsed().as_secs_f64() * 1000.0);
        outcomes.push(out);
    }
    Ok((latencies, outcomes))
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Full-corpus versus routed retrieval over the same queries.
///
/// Latency is wall clock and hardware dependent; scores and agreement are
/// deterministic for a seed.
pub fn bench_routing(config: &RoutingBenchConfig) -> Result<BenchReport, RetrievalError> {
    let provider: Arc<dyn EmbeddingProvider> =
        Arc::new(HashedBagOfWords::new(config.embedding_dim).map_err(RetrievalError::Core)?);
    let corpus = RoutingCorpus::generate(config);
    let kb = corpus.knowledge_base(provider)?;
    let session = SessionId::from("bench-routing");
    let routing_available = config.domains >= 2;
    let reps = config.repetitions.max(1);

    let mut full_totals = Vec::with_capacity(reps);
    let mut routed_totals = Vec::with_capacity(reps);
    let mut full_per_query: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); corpus.queries.len()];
    let mut routed_per_query: Vec<Vec<f64>> = vec![Vec::with_capacity(reps); corpus.queries.len()];
    let mut full_out = Vec::new();
    let mut routed_out = Vec::new();
    for _ in 0..reps {
        let (lat, out) = timed_pass(&kb, &session, &corpus, config.top_k, false)?;
        full_totals.push(lat.iter().sum::<f64>());
        for (i, l) in lat.iter().enumerate() {
            full_per_query[i].push(*l);
        }
        full_out = out;
        if routing_available {
            let (lat, out) = timed_pass(&kb, &session, &corpus, config.top_k, true)?;
            routed_totals.push(lat.iter().sum::<f64>());
            for (i, l) in lat.iter().enumerate() {
                routed_per_query[i].push(*l);
            }
            routed_out = out;
        }
    }
    if !routing_available {
        // Routing falls back to the full corpus: same work, same answers.
        routed_totals = full_totals.clone();
        routed_per_query = full_per_query.clone();
        routed_out = full_out.clone();
    }
    let full_ms = median(&mut full_totals);
    let routed_ms = median(&mut routed_totals);
    let full_q: Vec<f64> = full_per_query.iter_mut().map(|v| median(v)).collect();
    let routed_q: Vec<f64> = routed_per_query.iter_mut().map(|v| median(v)).collect();

    let top1 = |o: &RetrievalOutcome| o.results.first().map(|r| (r.chunk.id.clone(), r.rerank_score, r.chunk.domain.clone()));
    let mut trials = Vec::with_capacity(corpus.queries.len());
    let (mut routed_correct, mut agree) = (0usize, 0usize);
    let (mut intent_agree, mut consistent, mut consistent_agree) = (0usize, 0usize, 0usize);
    let (mut full_scores, mut routed_scores) = (Vec::new(), Vec::new());
    for (i, (q, oracle, src)) in corpus.queries.iter().enumerate() {
        let f = top1(&full_out[i]);
        let r = top1(&routed_out[i]);
        let oracle_domain = &corpus.domains[*oracle];
        let routed_domain = routed_out[i].routed_domain.clone();
        let correct = routed_domain.as_deref() == Some(oracle_domain.as_str());
        let same = f.as_ref().map(|x| &x.0) == r.as_ref().map(|x| &x.0);
        routed_correct += usize::from(correct);
        agree += usize::from(same);
        if correct {
            intent_agree += usize::from(same);
            // The full-corpus winner lies inside the routed domain.
            if f.as_ref().map(|x| x.2.as_str()) == Some(oracle_domain.as_str()) {
                consistent += 1;
                consistent_agree += usize::from(same);
            }
        }
        full_scores.push(f.as_ref().map_or(0.0, |x| x.1));
        routed_scores.push(r.as_ref().map_or(0.0, |x| x.1));
        trials.push(json!({
            "query": q,
            "oracle_domain": oracle_domain,
            "source_chunk": corpus.chunks[*src].0,
            "routed_domain": routed_domain,
            "full_top1": f.as_ref().map(|x| &x.0),
            "routed_top1": r.as_ref().map(|x| &x.0),
            "full_top1_score": f.as_ref().map(|x| x.1),
            "routed_top1_score": r.as_ref().map(|x| x.1),
            "full_scanned": full_out[i].scanned,
            "routed_scanned": routed_out[i].scanned,
            "full_latency_ms": full_q[i],
            "routed_latency_ms": routed_q[i],
        }));
    }

    let n = corpus.queries.len().max(1) as f64;
    let pct = |num: usize, den: usize| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
    let mut aggregates = BTreeMap::new();
    for (name, v) in [
        ("latency_ms.full", &full_q),
        ("latency_ms.routed", &routed_q),
        ("top1_score.full", &full_scores),
        ("top1_score.routed", &routed_scores),
    ] {
        if let Some(a) = Aggregates::of(v) {
            aggregates.insert(name.to_owned(), a);
        }
    }
    let comparison = if routing_available {
        Comparison::new("latency_ms", "full_corpus", "routed", full_ms, routed_ms)
    } else {
        Comparison::new("latency_ms", "full_corpus", "routed", full_ms, full_ms)
    };
    let mut metrics = BTreeMap::new();
    metrics.insert("routing_available".to_owned(), f64::from(u8::from(routing_available)));
    metrics.insert("latency_reduction_pct".to_owned(), -comparison.delta_pct);
    metrics.insert("full_total_ms".to_owned(), full_ms);
    metrics.insert("routed_total_ms".to_owned(), routed_ms);
    metrics.insert("routing_accuracy_pct".to_owned(), pct(routed_correct, corpus.queries.len()));
    metrics.insert("top1_agreement_pct".to_owned(), pct(agree, corpus.queries.len()));
    metrics.insert("intent_consistent_queries".to_owned(), routed_correct as f64);
    metrics.insert("intent_consistent_top1_agreement_pct".to_owned(), pct(intent_agree, routed_correct));
    metrics.insert("fully_consistent_queries".to_owned(), consistent as f64);
    metrics.insert("fully_consistent_top1_agreement_pct".to_owned(), pct(consistent_agree, consistent));
    metrics.insert("mean_top1_score.full".to_owned(), full_scores.iter().sum::<f64>() / n);
    metrics.insert("mean_top1_score.routed".to_owned(), routed_scores.iter().sum::<f64>() / n);
    metrics.insert(
        "mean_scanned.full".to_owned(),
        full_out.iter().map(|o| o.scanned as f64).sum::<f64>() / n,
    );
    metrics.insert(
        "mean_scanned.routed".to_owned(),
        routed_out.iter().map(|o| o.scanned as f64).sum::<f64>() / n,
    );
    Ok(BenchReport {
        experiment: "routing".to_owned(),
        seed: config.seed,
        config: serde_json::to_value(config).expect("config is serializable"),
        trials,
        aggregates,
        comparison,
        metrics,
    })
}
