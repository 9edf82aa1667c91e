use std::path::Path;
use std::process::Command;
use std::time::Instant;

use serde_json::Value;
use talkhead_core::bench::{HistoryBenchConfig, HistorySuite};
use talkhead_core::retrieval::{history_chunk_text, RERANK_SCALE};
use talkhead_core::{EmbeddingProvider, HashedBagOfWords};

use crate::{ensure, Outcome};

/// Runs the CLI and returns the JSON report and wall time in seconds.
fn run_cli(args: &[&str], json: &Path) -> Result<(Value, f64), String> {
    let started = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_talkhead"))
        .args(args)
        .arg("--json")
        .arg(json)
        .output()
        .map_err(|e| e.to_string())?;
    let secs = started.elapsed().as_secs_f64();
    ensure!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(json).map_err(|e| e.to_string())?;
    Ok((serde_json::from_str(&text).map_err(|e| e.to_string())?, secs))
}

fn metric(report: &Value, name: &str) -> Result<f64, String> {
    report["metrics"][name]
        .as_f64()
        .ok_or_else(|| format!("report has no metric {name}"))
}

pub fn ttfa() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let args = ["bench", "ttfa", "--chars", "400", "--synth-ms-per-char", "25"];
    let (a, secs) = run_cli(&args, &dir.path().join("a.json"))?;
    let (b, _) = run_cli(&args, &dir.path().join("b.json"))?;
    let reduction = metric(&a, "reduction_pct")?;
    ensure!((80.0..=90.0).contains(&reduction), "reduction {reduction:.2}% outside [80, 90]");
    ensure!(secs < 1.0, "took {secs:.3}s");
    let raw = |n: &str| std::fs::read(dir.path().join(n)).unwrap_or_default();
    ensure!(raw("a.json") == raw("b.json") && a == b, "reports differ between runs");
    for seed in ["1", "2", "3"] {
        let mut with_seed = args.to_vec();
        with_seed.extend(["--seed", seed]);
        let (r, _) = run_cli(&with_seed, &dir.path().join("s.json"))?;
        let x = metric(&r, "reduction_pct")?;
        ensure!((80.0..=90.0).contains(&x), "seed {seed}: reduction {x:.2}%");
    }
    Ok(format!("reduction {reduction:.2}%, {secs:.3}s, identical reruns"))
}

pub fn routing() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (r, secs) = run_cli(
        &["bench", "routing", "--chunks", "100000", "--domains", "5", "--queries", "500", "--seed", "0"],
        &dir.path().join("routing.json"),
    )?;
    let reduction = metric(&r, "latency_reduction_pct")?;
    let agreement = metric(&r, "intent_consistent_top1_agreement_pct")?;
    let consistent = metric(&r, "fully_consistent_top1_agreement_pct")?;
    ensure!(reduction >= 30.0, "latency reduction {reduction:.1}% < 30%");
    ensure!(agreement >= 80.0, "top-1 agreement {agreement:.1}% < 80%");
    ensure!(consistent == 100.0, "consistent-query agreement {consistent}% != 100%");
    ensure!(secs < 120.0, "runtime {secs:.1}s");
    Ok(format!(
        "latency -{reduction:.1}%, agreement {agreement:.1}% (consistent {consistent:.0}%), {secs:.1}s"
    ))
}

fn oracle_cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| f64::from(*x) * f64::from(*y)).sum();
    let na: f64 = a.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| f64::from(*x).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

pub fn history() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (r, _) = run_cli(&["bench", "history", "--turns", "10", "--seed", "0"], &dir.path().join("h.json"))?;
    let greater = metric(&r, "strictly_greater")?;
    let improvement = metric(&r, "relative_improvement_pct")?;
    ensure!(greater == 10.0, "dynamic beat static on {greater}/10 follow-ups");
    ensure!(improvement >= 20.0, "improvement {improvement:.1}% < 20%");

    // Recompute every follow-up's best score by exhaustive scoring.
    let config = HistoryBenchConfig::default();
    let suite = HistorySuite::generate(&config);
    let embedder = HashedBagOfWords::new(config.embedding_dim).map_err(|e| e.to_string())?;
    let corpus: Vec<Vec<f32>> = suite.corpus.iter().map(|c| embedder.embed(&c.2).values().to_vec()).collect();
    let mut history: Vec<Vec<f32>> = Vec::new();
    let trials = r["trials"].as_array().ok_or("no trials")?;
    for (i, (turn, trial)) in suite.turns.iter().zip(trials).enumerate() {
        history.push(embedder.embed(&history_chunk_text(&turn.question, &turn.answer)).values().to_vec());
        let q = embedder.embed(&turn.follow_up).values().to_vec();
        let best = |set: &mut dyn Iterator<Item = &Vec<f32>>| {
            set.map(|c| oracle_cosine(&q, c)).fold(f64::NEG_INFINITY, f64::max) * RERANK_SCALE
        };
        let s = best(&mut corpus.iter());
        let d = best(&mut corpus.iter().chain(&history));
        let rs = trial["static_top1_score"].as_f64().ok_or("missing static score")?;
        let rd = trial["dynamic_top1_score"].as_f64().ok_or("missing dynamic score")?;
        ensure!((s - rs).abs() < 1e-9, "turn {i}: static {rs} vs oracle {s}");
        ensure!((d - rd).abs() < 1e-9, "turn {i}: dynamic {rd} vs oracle {d}");
        ensure!(d > s, "turn {i}: oracle dynamic {d} not above static {s}");
    }
    Ok(format!("10/10 strictly greater, +{improvement:.1}%, oracle agrees on every follow-up"))
}
