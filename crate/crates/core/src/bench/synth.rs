use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

const CONSONANTS: &[u8] = b"bdfgklmnprtvz";
const VOWELS: &[u8] = b"aeiou";

const FUNCTION_WORDS: &[&str] = &[
    "the", "what", "about", "and", "of", "to", "in", "it", "its", "that", "for", "with", "on", "how",
];

/// Common words shared by synthetic corpora and queries.
pub fn function_words() -> &'static [&'static str] {
    FUNCTION_WORDS
}

/// Source of unique pronounceable tokens. Tokens end in a vowel, so
/// suffix stemming never merges two of them.
pub struct PseudoWords {
    seen: HashSet<String>,
}

impl PseudoWords {
    pub fn new() -> Self {
        Self {
            seen: FUNCTION_WORDS.iter().map(|w| (*w).to_owned()).collect(),
        }
    }

    pub fn next(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let mut w = String::with_capacity(8);
            for _ in 0..4 {
                w.push(CONSONANTS[rng.random_range(0..CONSONANTS.len())] as char);
                w.push(VOWELS[rng.random_range(0..VOWELS.len())] as char);
            }
            if self.seen.insert(w.clone()) {
                return w;
            }
        }
    }

    pub fn take(&mut self, rng: &mut ChaCha8Rng, n: usize) -> Vec<String> {
        (0..n).map(|_| self.next(rng)).collect()
    }
}

impl Default for PseudoWords {
    fn default() -> Self {
        Self::new()
    }
}
