use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub mean: f64,
    pub p50: f64,
    pub p95: f64,
}

impl Aggregates {
    /// Nearest-rank percentiles. `None` for an empty sample.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = |p: f64| {
            let idx = (p / 100.0 * sorted.len() as f64).ceil() as usize;
            sorted[idx.clamp(1, sorted.len()) - 1]
        };
        Some(Self {
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            p50: rank(50.0),
            p95: rank(95.0),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub metric: String,
    pub baseline_label: String,
    pub variant_label: String,
    pub baseline: f64,
    pub variant: f64,
    /// `100 * (variant - baseline) / baseline`.
    pub delta_pct: f64,
}

impl Comparison {
    pub fn new(metric: &str, baseline_label: &str, variant_label: &str, baseline: f64, variant: f64) -> Self {
        let delta_pct = if baseline == 0.0 {
            0.0
        } else {
            100.0 * (variant - baseline) / baseline
        };
        Self {
            metric: metric.to_owned(),
            baseline_label: baseline_label.to_owned(),
            variant_label: variant_label.to_owned(),
            baseline,
            variant,
            delta_pct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub experiment: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub trials: Vec<serde_json::Value>,
    pub aggregates: BTreeMap<String, Aggregates>,
    pub comparison: Comparison,
    /// Experiment-specific scalar results.
    pub metrics: BTreeMap<String, f64>,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is always serializable")
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    /// Human-readable summary.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "experiment  {}", self.experiment);
        let _ = writeln!(out, "seed        {}", self.seed);
        let _ = writeln!(out, "trials      {}", self.trials.len());
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<28} {:>14} {:>14} {:>14}", "series", "mean", "p50", "p95");
        for (name, a) in &self.aggregates {
            let _ = writeln!(out, "{:<28} {:>14.4} {:>14.4} {:>14.4}", name, a.mean, a.p50, a.p95);
        }
        let _ = writeln!(out);
        let c = &self.comparison;
        let _ = writeln!(out, "{} ({} -> {})", c.metric, c.baseline_label, c.variant_label);
        let _ = writeln!(
            out,
            "  {:.4} -> {:.4}  ({:+.2}%)",
            c.baseline, c.variant, c.delta_pct
        );
        if !self.metrics.is_empty() {
            let _ = writeln!(out);
            for (k, v) in &self.metrics {
                let _ = writeln!(out, "{k:<28} {v:.4}");
            }
        }
        out
    }
}
