use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("embedding dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
}

/// Opaque identifier of a live conversation session.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SessionId(String);

impl SessionId {
    /// Fresh random identifier.
    pub fn generate() -> Self {
        Self(uuid::Uuid::new_v4().simple().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for SessionId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

impl From<String> for SessionId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

impl fmt::Display for SessionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    User,
    Assistant,
}

/// One utterance in a session's dialogue log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueTurn {
    pub role: Role,
    pub text: String,
    pub turn_index: u64,
    /// Milliseconds on the session clock.
    pub wall_time_ms: u64,
}

/// Append-only dialogue log enforcing strictly increasing turn indexes and
/// non-empty text.
#[derive(Debug, Clone, Default)]
pub struct DialogueLog {
    turns: Vec<DialogueTurn>,
}

impl DialogueLog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a turn; returns `None` when `text` is blank.
    pub fn push(&mut self, role: Role, text: &str, wall_time_ms: u64) -> Option<&DialogueTurn> {
        if text.trim().is_empty() {
            return None;
        }
        let turn_index = self.turns.last().map_or(0, |t| t.turn_index + 1);
        self.turns.push(DialogueTurn {
            role,
            text: text.to_owned(),
            turn_index,
            wall_time_ms,
        });
        self.turns.last()
    }

    pub fn turns(&self) -> &[DialogueTurn] {
        &self.turns
    }

    pub fn len(&self) -> usize {
        self.turns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.turns.is_empty()
    }
}
