use serde::{Deserialize, Serialize};

use super::SpeechError;

/// Characters after which an answer may be split.
pub const TERMINAL_PUNCTUATION: &[char] = &['.', '!', '?', '。', '！', '？', ';', '；'];

/// How a segment ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Punctuation,
    HardSplit,
    End,
}

/// One phrase of an answer, synthesized as a unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TextSegment {
    pub text: String,
    pub seq: usize,
    pub char_count: usize,
    pub boundary: Boundary,
}

impl TextSegment {
    pub fn new(text: impl Into<String>, seq: usize) -> Self {
        let text = text.into();
        let char_count = text.chars().count();
        Self {
            text,
            seq,
            char_count,
            boundary: Boundary::End,
        }
    }
}

fn is_terminal(c: char) -> bool {
    TERMINAL_PUNCTUATION.contains(&c)
}

fn is_fullwidth(c: char) -> bool {
    matches!(c, '。' | '！' | '？' | '；')
}

#[derive(Debug, Clone, Copy)]
struct Span {
    start: usize,
    end: usize,
    boundary: Boundary,
}

impl Span {
    fn len(&self) -> usize {
        self.end - self.start
    }
}

/// Splits `answer` into phrase segments for streaming synthesis.
///
/// Rules:
/// - a split point follows a run of terminal punctuation that ends the text,
///   is followed by whitespace, or is full-width (CJK text has no spaces);
///   the delimiter stays left, the whitespace goes right;
/// - pieces shorter than `min_chars` are merged into the next piece (the
///   last one may stay short; a trailing whitespace-only piece joins the
///   previous segment);
/// - anything longer than `max_chars` is cut at the last whitespace within
///   the first `max_chars` characters, or at `max_chars` if there is none.
///
/// Concatenating the segments reproduces `answer` exactly.
pub fn split_response(
    answer: &str,
    min_chars: usize,
    max_chars: usize,
) -> Result<Vec<TextSegment>, SpeechError> {
    if min_chars == 0 || max_chars == 0 || min_chars > max_chars {
        return Err(SpeechError::InvalidBounds {
            min: min_chars,
            max: max_chars,
        });
    }
    if answer.trim().is_empty() {
        return Err(SpeechError::EmptyText);
    }
    let chars: Vec<char> = answer.chars().collect();

    let mut pieces = Vec::new();
    let mut start = 0;
    for i in 0..chars.len() {
        let c = chars[i];
        if !is_terminal(c) {
            continue;
        }
        let next = chars.get(i + 1).copied();
        let splits = match next {
            None => false,
            Some(n) if is_terminal(n) => false,
            Some(n) => n.is_whitespace() || is_fullwidth(c),
        };
        if splits {
            pieces.push(Span {
                start,
                end: i + 1,
                boundary: Boundary::Punctuation,
            });
            start = i + 1;
        }
    }
    if start < chars.len() {
        pieces.push(Span {
            start,
            end: chars.len(),
            boundary: Boundary::End,
        });
    }

    let merged = merge_short(&chars, pieces, min_chars);

    let mut spans = Vec::with_capacity(merged.len());
    for span in merged {
        hard_split(&chars, span, max_chars, &mut spans);
    }

    Ok(spans
        .into_iter()
        .enumerate()
        .map(|(seq, s)| TextSegment {
            text: chars[s.start..s.end].iter().collect(),
            seq,
            char_count: s.len(),
            boundary: s.boundary,
        })
        .collect())
}

fn merge_short(chars: &[char], mut pieces: Vec<Span>, min_chars: usize) -> Vec<Span> {
    let blank = |s: &Span| chars[s.start..s.end].iter().all(|c| c.is_whitespace());
    // Only the last piece can be whitespace-only; it belongs to the
    // previous one.
    if pieces.len() > 1 && pieces.last().is_some_and(blank) {
        let tail = pieces.pop().expect("checked");
        let last = pieces.last_mut().expect("checked");
        last.end = tail.end;
        last.boundary = Boundary::End;
    }
    let mut out: Vec<Span> = Vec::with_capacity(pieces.len());
    let mut pending: Option<Span> = None;
    for piece in pieces {
        let cur = match pending.take() {
            Some(mut p) => {
                p.end = piece.end;
                p.boundary = piece.boundary;
                p
            }
            None => piece,
        };
        if cur.len() >= min_chars {
            out.push(cur);
        } else {
            pending = Some(cur);
        }
    }
    if let Some(rest) = pending {
        out.push(rest);
    }
    out
}

fn hard_split(chars: &[char], span: Span, max_chars: usize, out: &mut Vec<Span>) {
    let mut start = span.start;
    while span.end - start > max_chars {
        let limit = start + max_chars;
        // Cut before the last whitespace in (start, limit], provided the
        // left part has some content.
        let cut = (start + 1..=limit)
            .rev()
            .find(|&p| chars[p].is_whitespace() && chars[start..p].iter().any(|c| !c.is_whitespace()))
            .unwrap_or(limit);
        out.push(Span {
            start,
            end: cut,
            boundary: Boundary::HardSplit,
        });
        start = cut;
    }
    out.push(Span {
        start,
        end: span.end,
        boundary: span.boundary,
    });
}
