//! Benchmark harness: time to first audio, routed retrieval and
//! history-augmented retrieval on seeded synthetic workloads.

mod history;
mod report;
mod routing;
mod synth;
mod ttfa;

pub use history::{bench_history, HistoryBenchConfig, HistorySuite, HistoryTurn};
pub use report::{Aggregates, BenchReport, Comparison};
pub use routing::{bench_routing, RoutingBenchConfig, RoutingCorpus};
pub use synth::{function_words, PseudoWords};
pub use ttfa::{bench_ttfa, TtfaBenchConfig};
