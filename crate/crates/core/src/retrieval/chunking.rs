//! Paragraph-first document chunking.

use std::ops::Range;

use super::RetrievalError;

/// Splits `doc` into chunk texts of at most `target_chars` characters.
///
/// Paragraphs (separated by blank lines) are packed greedily; a paragraph
/// longer than `target_chars` is split at sentence ends, with each chunk
/// starting `overlap_chars` characters before the end of the previous one.
/// Every non-whitespace character of `doc` lands in at least one chunk.
pub fn chunk_document(doc: &str, target_chars: usize, overlap_chars: usize) -> Result<Vec<String>, RetrievalError> {
    Ok(chunk_spans(doc, target_chars, overlap_chars)?
        .into_iter()
        .map(|r| doc[r].to_owned())
        .collect())
}

/// Byte ranges of the chunks produced by [`chunk_document`].
pub fn chunk_spans(doc: &str, target_chars: usize, overlap_chars: usize) -> Result<Vec<Range<usize>>, RetrievalError> {
    if target_chars == 0 || overlap_chars >= target_chars {
        return Err(RetrievalError::InvalidChunking {
            target: target_chars,
            overlap: overlap_chars,
        });
    }
    if doc.trim().is_empty() {
        return Err(RetrievalError::EmptyDoc);
    }
    // Byte offset of every char, plus the end.
    let offsets: Vec<usize> = doc.char_indices().map(|(i, _)| i).chain([doc.len()]).collect();
    let chars: Vec<char> = doc.chars().collect();

    let mut spans = Vec::new();
    let mut pending: Option<(usize, usize)> = None;
    for (start, end) in paragraphs(&chars) {
        let len = end - start;
        if len > target_chars {
            if let Some(p) = pending.take() {
                spans.push(p);
            }
            split_paragraph(&chars, start, end, target_chars, overlap_chars, &mut spans);
            continue;
        }
        pending = match pending {
            Some((ps, _)) if end - ps <= target_chars => Some((ps, end)),
            Some(p) => {
                spans.push(p);
                Some((start, end))
            }
            None => Some((start, end)),
        };
    }
    if let Some(p) = pending {
        spans.push(p);
    }
    Ok(spans.into_iter().map(|(s, e)| offsets[s]..offsets[e]).collect())
}

/// Char ranges of trimmed paragraphs.
fn paragraphs(chars: &[char]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    let n = chars.len();
    while i < n {
        while i < n && chars[i].is_whitespace() {
            i += 1;
        }
        if i == n {
            break;
        }
        let start = i;
        let mut end = i;
        while i < n {
            if chars[i] == '\n' {
                // Blank line ahead?
                let mut j = i + 1;
                while j < n && chars[j] != '\n' && chars[j].is_whitespace() {
                    j += 1;
                }
                if j < n && chars[j] == '\n' || j == n {
                    break;
                }
            }
            if !chars[i].is_whitespace() {
                end = i + 1;
            }
            i += 1;
        }
        out.push((start, end));
    }
    out
}

fn is_sentence_end(chars: &[char], i: usize) -> bool {
    matches!(chars[i], '.' | '!' | '?' | '。' | '！' | '？')
        && chars.get(i + 1).is_none_or(|c| c.is_whitespace())
}

fn split_paragraph(
    chars: &[char],
    start: usize,
    end: usize,
    target: usize,
    overlap: usize,
    out: &mut Vec<(usize, usize)>,
) {
    let mut s = start;
    loop {
        let limit = s + target;
        if end <= limit {
            out.push((s, end));
            return;
        }
        // Last sentence end that still makes progress past the overlap.
        let cut = (s + overlap + 1..=limit)
            .rev()
            .find(|&b| is_sentence_end(chars, b - 1))
            .or_else(|| (s + overlap + 1..=limit).rev().find(|&b| chars[b].is_whitespace()))
            .unwrap_or(limit);
        out.push((s, cut));
        s = cut - overlap;
    }
}
