//! Sentence segmentation and word tokenization.
//!
//! Tokens are maximal runs of Unicode alphanumeric characters. Every other
//! character, apostrophes and hyphens included, separates tokens and is
//! dropped. Case is preserved.
//!
//! Sentences end at `.`, `!` or `?` followed by whitespace, and at blank
//! lines. Abbreviations are not special-cased.

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub sentence_index: usize,
    pub position: usize,
}

/// Splits text into sentence slices.
pub trait SentenceSplitter: Send + Sync {
    fn split<'a>(&self, text: &'a str) -> Vec<&'a str>;
}

/// The default terminator / blank-line segmentation rule.
#[derive(Debug, Clone, Copy, Default)]
pub struct PunctuationSplitter;

impl SentenceSplitter for PunctuationSplitter {
    fn split<'a>(&self, text: &'a str) -> Vec<&'a str> {
        split_sentences(text)
    }
}

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '!' | '?')
}

/// Returns trimmed, non-empty sentence slices.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut push = |from: usize, to: usize| {
        let s = text[from..to].trim();
        if !s.is_empty() {
            out.push(s);
        }
    };

    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if is_terminator(c) {
            if let Some(&(_, next)) = iter.peek() {
                if next.is_whitespace() {
                    let end = i + c.len_utf8();
                    push(start, end);
                    start = end;
                }
            }
        } else if c == '\n' {
            let rest = &text[i + 1..];
            let gap = rest.char_indices().find(|&(_, ch)| ch == '\n' || !ch.is_whitespace());
            if let Some((j, '\n')) = gap {
                push(start, i);
                start = i + 1 + j + 1;
                // Skip the second newline of the blank line.
                while iter.peek().is_some_and(|&(k, _)| k < start) {
                    iter.next();
                }
            }
        }
    }
    push(start, text.len());
    out
}

/// Maximal alphanumeric runs of `text`, as slices.
pub fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|w| !w.is_empty())
}

/// A sentence with its source text and tokens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence<'a> {
    pub text: &'a str,
    pub tokens: Vec<&'a str>,
}

/// Sentences that contain at least one token.
pub fn sentences<'a>(text: &'a str, splitter: &dyn SentenceSplitter) -> Vec<Sentence<'a>> {
    splitter
        .split(text)
        .into_iter()
        .filter_map(|s| {
            let tokens: Vec<&str> = words(s).collect();
            (!tokens.is_empty()).then_some(Sentence { text: s, tokens })
        })
        .collect()
}

pub fn tokenize(text: &str) -> Vec<Vec<Token>> {
    sentences(text, &PunctuationSplitter)
        .into_iter()
        .enumerate()
        .map(|(sentence_index, s)| {
            s.tokens
                .into_iter()
                .enumerate()
                .map(|(position, w)| Token { surface: w.to_string(), sentence_index, position })
                .collect()
        })
        .collect()
}
