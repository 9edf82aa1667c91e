use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use talkhead_core::bench::{
    bench_history, bench_routing, bench_ttfa, BenchReport, HistoryBenchConfig, RoutingBenchConfig, TtfaBenchConfig,
};
use talkhead_core::retrieval::{read_corpus_dir, KnowledgeBase, RetrievalConfig};
use talkhead_core::HashedBagOfWords;
use talkhead_service::{AppState, ServiceConfig};

mod mock_provider;

#[derive(Parser)]
#[command(name = "talkhead", version, about = "Conversational avatar engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a benchmark and print its report.
    #[command(subcommand)]
    Bench(BenchCommand),
    /// Start the REST/WebSocket service.
    Serve {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Ingest a corpus directory (one subdirectory per domain).
    Ingest {
        #[arg(long)]
        dir: PathBuf,
        /// Post the documents to a running service instead of a local dry run.
        #[arg(long)]
        server: Option<String>,
        #[arg(long, env = "TALKHEAD_TOKEN", default_value = "change-me")]
        token: String,
    },
    /// Serve the provider protocol on stdin/stdout with built-in mocks.
    #[command(hide = true)]
    MockProvider {
        #[arg(long, default_value_t = talkhead_core::embedding::DEFAULT_DIMENSION)]
        dim: usize,
        #[arg(long, default_value_t = 1.0)]
        clock_speed: f64,
    },
}

#[derive(Args)]
struct ReportArgs {
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BenchCommand {
    /// Segmented vs whole-answer time to first audio (simulated clock).
    Ttfa {
        #[arg(long, default_value_t = 400)]
        chars: usize,
        #[arg(long, default_value_t = 25)]
        synth_ms_per_char: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Full-corpus vs intent-routed retrieval latency.
    Routing {
        #[arg(long, default_value_t = 100_000)]
        chunks: usize,
        #[arg(long, default_value_t = 5)]
        domains: usize,
        #[arg(long, default_value_t = 500)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[command(flatten)]
        report: ReportArgs,
    },
    /// Static vs history-augmented retrieval on follow-up questions.
    History {
        #[arg(long, default_value_t = 10)]
        turns: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        report: ReportArgs,
    },
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    match Cli::parse().command {
        Command::Bench(b) => bench(b),
        Command::Serve { config } => serve(config),
        Command::Ingest { dir, server, token } => ingest(dir, server, &token),
        Command::MockProvider { dim, clock_speed } => mock_provider::run(dim, clock_speed),
    }
}

fn bench(command: BenchCommand) -> Result<()> {
    let (report, out) = match command {
        BenchCommand::Ttfa {
            chars,
            synth_ms_per_char,
            seed,
            report,
        } => {
            let mut config = TtfaBenchConfig {
                chars,
                seed,
                ..TtfaBenchConfig::default()
            };
            config.pipeline.mock_tts.synth_ms_per_char = synth_ms_per_char;
            (bench_ttfa(&config)?, report)
        }
        BenchCommand::Routing {
            chunks,
            domains,
            queries,
            seed,
            reps,
            report,
        } => {
            let config = RoutingBenchConfig {
                chunks,
                domains,
                queries,
                seed,
                repetitions: reps,
                ..RoutingBenchConfig::default()
            };
            (bench_routing(&config)?, report)
        }
        BenchCommand::History { turns, seed, report } => {
            let config = HistoryBenchConfig {
                turns,
                seed,
                ..HistoryBenchConfig::default()
            };
            (bench_history(&config)?, report)
        }
    };
    emit(&report, out.json)
}

fn emit(report: &BenchReport, json: Option<PathBuf>) -> Result<()> {
    print!("{}", report.to_table());
    if let Some(path) = json {
        std::fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn serve(path: Option<PathBuf>) -> Result<()> {
    let config = match path {
        Some(p) => ServiceConfig::load(&p)?,
        None => ServiceConfig::default(),
    };
    let bind = config.bind;
    let state = AppState::new(config)?;
    let rt = tokio::runtime::Runtime::new()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&bind)
            .await
            .with_context(|| format!("binding {bind}"))?;
        tracing::info!(addr = %listener.local_addr()?, "listening");
        talkhead_service::serve(listener, state).await?;
        Ok(())
    })
}

fn ingest(dir: PathBuf, server: Option<String>, token: &str) -> Result<()> {
    match server {
        None => {
            let kb = KnowledgeBase::new(std::sync::Arc::new(HashedBagOfWords::default()), RetrievalConfig::default());
            let reports = kb.ingest_dir(&dir)?;
            if reports.is_empty() {
                bail!("{} has no domain subdirectories", dir.display());
            }
            println!("{:<20} {:>10} {:>10}", "domain", "documents", "chunks");
            for (domain, r) in reports {
                println!("{domain:<20} {:>10} {:>10}", r.new_documents, r.chunks_added);
            }
            Ok(())
        }
        Some(base) => post_corpus(&dir, base.trim_end_matches('/'), token),
    }
}

fn post_corpus(dir: &std::path::Path, base: &str, token: &str) -> Result<()> {
    let corpus = read_corpus_dir(dir)?;
    if corpus.is_empty() {
        bail!("{} has no domain subdirectories", dir.display());
    }
    let client = reqwest::blocking::Client::new();
    for (domain, docs) in corpus {
        let resp = client
            .post(format!("{base}/v1/corpus/ingest"))
            .bearer_auth(token)
            .json(&serde_json::json!({ "domain": domain, "documents": docs }))
            .send()?;
        let status = resp.status();
        let body: serde_json::Value = resp.json().unwrap_or_default();
        if !status.is_success() {
            bail!("{domain}: {status} {}", body["error"]);
        }
        let count = |k: &str| body[k].as_u64().unwrap_or(0);
        println!(
            "{domain:<20} new {:>4}  duplicate {:>4}  chunks added {:>5}",
            count("new_documents"),
            count("duplicate_documents"),
            count("chunks_added")
        );
    }
    Ok(())
}
