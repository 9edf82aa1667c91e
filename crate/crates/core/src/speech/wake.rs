//! Wake-phrase gate over transcript text.
//!
//! While idle the gate keeps a sliding window of the last few transcript
//! tokens and wakes when the window ends with the wake phrase. Once active,
//! utterances pass through as queries until a completed turn is followed by
//! `idle_timeout_ms` without input.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct WakeGateConfig {
    pub wake_phrase: String,
    pub window_tokens: usize,
    pub idle_timeout_ms: u64,
}

impl Default for WakeGateConfig {
    fn default() -> Self {
        Self {
            wake_phrase: "hi reco".to_owned(),
            window_tokens: 8,
            idle_timeout_ms: 30_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateMode {
    Idle,
    Active,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GateDecision {
    /// Nothing reaches the pipeline.
    Ignored,
    /// Woke up but the utterance ended with the phrase; wait for the query.
    AwaitingQuery,
    Query(String),
}

#[derive(Debug, Clone)]
pub struct WakeGate {
    mode: GateMode,
    phrase: Vec<String>,
    window: VecDeque<String>,
    window_tokens: usize,
    idle_timeout_ms: u64,
    /// Set while active and waiting for the next utterance.
    waiting_since_ms: Option<u64>,
}

struct Token<'a> {
    text: &'a str,
    end: usize,
}

fn tokens(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        match (c.is_alphanumeric(), start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                out.push(Token { text: &text[s..i], end: i });
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &text[s..],
            end: text.len(),
        });
    }
    out
}

fn remainder(text: &str, from: usize) -> String {
    text[from..]
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .trim_end()
        .to_owned()
}

impl WakeGate {
    pub fn new(config: &WakeGateConfig) -> Self {
        let phrase: Vec<String> = tokens(&config.wake_phrase)
            .iter()
            .map(|t| t.text.to_lowercase())
            .collect();
        assert!(!phrase.is_empty(), "wake phrase must contain a word");
        Self {
            mode: GateMode::Idle,
            window_tokens: config.window_tokens.max(phrase.len()),
            phrase,
            window: VecDeque::new(),
            idle_timeout_ms: config.idle_timeout_ms,
            waiting_since_ms: None,
        }
    }

    pub fn mode(&self) -> GateMode {
        self.mode
    }

    /// Feeds one transcript utterance received at `now_ms`.
    pub fn feed(&mut self, transcript: &str, now_ms: u64) -> GateDecision {
        self.expire(now_ms);
        match self.mode {
            GateMode::Idle => self.scan(transcript, now_ms),
            GateMode::Active => {
                let toks = tokens(transcript);
                let query = if self.starts_with_phrase(&toks) {
                    remainder(transcript, toks[self.phrase.len() - 1].end)
                } else {
                    remainder(transcript, 0)
                };
                if query.is_empty() {
                    return GateDecision::Ignored;
                }
                self.waiting_since_ms = None;
                GateDecision::Query(query)
            }
        }
    }

    /// Signals that the pipeline finished a turn at `now_ms`; the idle
    /// timeout starts counting from here.
    pub fn turn_completed(&mut self, now_ms: u64) {
        if self.mode == GateMode::Active {
            self.waiting_since_ms = Some(now_ms);
        }
    }

    /// Drops back to idle if the follow-up window has elapsed.
    pub fn expire(&mut self, now_ms: u64) {
        if let (GateMode::Active, Some(since)) = (self.mode, self.waiting_since_ms) {
            if now_ms.saturating_sub(since) >= self.idle_timeout_ms {
                self.mode = GateMode::Idle;
                self.window.clear();
                self.waiting_since_ms = None;
            }
        }
    }

    fn starts_with_phrase(&self, toks: &[Token<'_>]) -> bool {
        toks.len() >= self.phrase.len()
            && toks
                .iter()
                .zip(&self.phrase)
                .all(|(t, p)| t.text.to_lowercase() == *p)
    }

    fn scan(&mut self, transcript: &str, now_ms: u64) -> GateDecision {
        for tok in tokens(transcript) {
            self.window.push_back(tok.text.to_lowercase());
            if self.window.len() > self.window_tokens {
                self.window.pop_front();
            }
            if self.window_matches() {
                self.mode = GateMode::Active;
                self.window.clear();
                let query = remainder(transcript, tok.end);
                return if query.is_empty() {
                    self.waiting_since_ms = Some(now_ms);
                    GateDecision::AwaitingQuery
                } else {
                    GateDecision::Query(query)
                };
            }
        }
        GateDecision::Ignored
    }

    fn window_matches(&self) -> bool {
        let n = self.phrase.len();
        self.window.len() >= n && self.window.iter().skip(self.window.len() - n).eq(self.phrase.iter())
    }
}
