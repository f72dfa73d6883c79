//! Sentence segmentation, text normalization and the extractive filter.

use std::collections::HashSet;

use unicode_normalization::UnicodeNormalization;

use crate::types::SourceDocument;

/// Tokens that end in a period but never end a sentence. Compared
/// case-insensitively against the whitespace-delimited word before the break.
pub const ABBREVIATIONS: &[&str] = &[
    "dr.", "mr.", "mrs.", "ms.", "st.", "vs.", "e.g.", "i.e.", "etc.",
];

const TERMINALS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '\u{201d}', '\u{2019}', '\u{bb}'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '\u{201c}', '\u{2018}', '\u{ab}'];

/// Casefold, NFC-normalize, collapse whitespace runs and strip the ends.
pub fn normalize(text: &str) -> String {
    let composed: String = text.nfc().collect();
    let folded = caseless::default_case_fold_str(&composed);
    let folded: String = folded.nfc().collect();
    collapse_whitespace(&folded)
}

pub fn collapse_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Rule-based splitter: a boundary follows `.`, `!` or `?` (plus any
/// closing quotes/brackets) when the next non-space character is an
/// uppercase letter or a digit and the word ending there is not a listed
/// abbreviation. Output sentences have their whitespace collapsed.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut start = 0usize;
    let mut i = 0usize;

    while i < chars.len() {
        let (_, c) = chars[i];
        if !TERMINALS.contains(&c) {
            i += 1;
            continue;
        }
        let punct_at = i;
        let mut j = i + 1;
        while j < chars.len() && (TERMINALS.contains(&chars[j].1) || CLOSERS.contains(&chars[j].1)) {
            j += 1;
        }
        let end = chars.get(j).map_or(text.len(), |&(b, _)| b);

        let mut k = j;
        while k < chars.len() && chars[k].1.is_whitespace() {
            k += 1;
        }
        let boundary = k > j
            && k < chars.len()
            && (chars[k].1.is_uppercase() || chars[k].1.is_ascii_digit())
            && !(c == '.' && is_abbreviation(text, chars[punct_at].0));

        if boundary {
            push_sentence(&mut out, &text[start..end]);
            start = end;
        }
        i = j;
    }
    push_sentence(&mut out, &text[start..]);
    out
}

fn push_sentence(out: &mut Vec<String>, piece: &str) {
    let s = collapse_whitespace(piece);
    if !s.is_empty() {
        out.push(s);
    }
}

/// Is the word ending at the period at byte `dot` a listed abbreviation?
fn is_abbreviation(text: &str, dot: usize) -> bool {
    let head = &text[..dot + 1];
    let word_start = head
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + head[p..].chars().next().map_or(1, char::len_utf8));
    let word = head[word_start..].trim_start_matches(OPENERS).to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

/// True when the sentence appears verbatim (after normalization) in the
/// document.
pub fn is_extractive(answer_sentence: &str, document: &SourceDocument) -> bool {
    let needle = normalize(answer_sentence);
    document
        .sentences()
        .iter()
        .any(|s| normalize(&s.text) == needle)
}

/// Normalized sentence texts of a document, for repeated extractive checks.
pub fn normalized_sentences(document: &SourceDocument) -> HashSet<String> {
    document
        .sentences()
        .iter()
        .map(|s| normalize(&s.text))
        .collect()
}
