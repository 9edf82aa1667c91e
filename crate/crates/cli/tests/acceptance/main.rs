//! End-to-end acceptance suite. Each criterion runs in turn and reports one
//! PASS/FAIL line; the process fails if any criterion does.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

mod bench;
mod oracles;
mod pipeline;
mod service;
mod speech;

/// Outcome detail on success, reason on failure.
pub type Outcome = Result<String, String>;

/// Fails the criterion with a formatted reason.
#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

type Criterion = (&'static str, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    ("ttfa_reduction_segmented_vs_whole", bench::ttfa),
    ("routing_latency_and_agreement", bench::routing),
    ("history_augmentation_lifts_follow_ups", bench::history),
    ("frame_index_properties_and_playback_sync", oracles::frame_sync),
    ("retrieve_and_motion_match_brute_force", oracles::brute_force),
    ("speech_split_overlap_add_wake_gate", speech::properties),
    ("pipeline_ordering_overlap_determinism", pipeline::ordering),
    ("service_grammar_and_ingest_idempotence", service::conformance),
];

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (name, check) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let started = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| (*s).to_owned()))
                .unwrap_or_else(|| "panicked".to_owned());
            Err(msg)
        });
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {name} [{secs:.2}s] {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL {name} [{secs:.2}s] {reason}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
