//! Brute-force n-gram counter.
//!
//! Re-implements the tokenization rules from scratch (paragraphs, then a
//! character walk) and counts by rescanning every sentence for each query.
//! It shares nothing with the table builder in `ngram`, so the two can be
//! checked against each other.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde_json::Value;

use crate::corpus::TimeBinning;
use crate::error::{Error, Result};

type Sentence = Vec<String>;

fn paragraph_sentences(paragraph: &str, out: &mut Vec<Sentence>) {
    let chars: Vec<char> = paragraph.chars().collect();
    let mut sentence: Sentence = Vec::new();
    let mut token = String::new();
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            token.push(c);
            continue;
        }
        if !token.is_empty() {
            sentence.push(std::mem::take(&mut token));
        }
        let ends = matches!(c, '.' | '!' | '?') && chars.get(i + 1).is_some_and(|n| n.is_whitespace());
        if ends && !sentence.is_empty() {
            out.push(std::mem::take(&mut sentence));
        }
    }
    if !token.is_empty() {
        sentence.push(token);
    }
    if !sentence.is_empty() {
        out.push(sentence);
    }
}

fn split_text(text: &str) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut paragraph = String::new();
    for line in text.split('\n') {
        if line.trim().is_empty() {
            paragraph_sentences(&paragraph, &mut out);
            paragraph.clear();
        } else {
            if !paragraph.is_empty() {
                paragraph.push('\n');
            }
            paragraph.push_str(line);
        }
    }
    paragraph_sentences(&paragraph, &mut out);
    out
}

#[derive(Debug, Clone)]
pub struct Oracle {
    bin_count: usize,
    docs: Vec<(usize, Vec<Sentence>)>,
}

impl Oracle {
    pub fn from_jsonl(jsonl: &str, binning: &TimeBinning, include_titles: bool) -> Result<Self> {
        let mut docs = Vec::new();
        for (i, line) in jsonl.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let bad = |m: &str| Error::Parse { line: i + 1, message: m.to_string() };
            let v: Value = serde_json::from_str(line).map_err(|e| bad(&e.to_string()))?;
            let date = v["date"].as_str().ok_or_else(|| bad("missing date"))?;
            let date = NaiveDate::parse_from_str(date, "%Y-%m-%d").map_err(|_| bad("bad date"))?;
            let bin = binning.bin_index(date).ok_or_else(|| bad("date outside binning"))?;
            let mut text = String::new();
            if include_titles {
                if let Some(title) = v["title"].as_str().filter(|t| !t.trim().is_empty()) {
                    text.push_str(title.trim_end());
                    text.push_str("\n\n");
                }
            }
            text.push_str(v["text"].as_str().ok_or_else(|| bad("missing text"))?);
            docs.push((bin, split_text(&text)));
        }
        Ok(Oracle { bin_count: binning.bin_count(), docs })
    }

    /// Occurrences of the token sequence per bin.
    pub fn count<S: AsRef<str>>(&self, ngram: &[S]) -> Vec<u64> {
        let mut counts = vec![0; self.bin_count];
        if ngram.is_empty() {
            return counts;
        }
        for (bin, sentences) in &self.docs {
            for s in sentences {
                if s.len() < ngram.len() {
                    continue;
                }
                for start in 0..=s.len() - ngram.len() {
                    if (0..ngram.len()).all(|k| s[start + k] == ngram[k].as_ref()) {
                        counts[*bin] += 1;
                    }
                }
            }
        }
        counts
    }

    /// Every distinct `n`-token sequence in the corpus.
    pub fn vocabulary(&self, n: usize) -> BTreeSet<Vec<String>> {
        let mut set = BTreeSet::new();
        for (_, sentences) in &self.docs {
            for s in sentences {
                if s.len() >= n {
                    for start in 0..=s.len() - n {
                        set.insert(s[start..start + n].to_vec());
                    }
                }
            }
        }
        set
    }
}

pub fn oracle_count<S: AsRef<str>>(jsonl: &str, ngram: &[S], binning: &TimeBinning) -> Result<Vec<u64>> {
    Ok(Oracle::from_jsonl(jsonl, binning, true)?.count(ngram))
}
