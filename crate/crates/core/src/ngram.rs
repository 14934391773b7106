//! N-gram extraction, per-bin counting and relative usage trends.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::TimeBinnedCorpus;
use crate::error::{Error, Result};
use crate::tokenize::{sentences, PunctuationSplitter, SentenceSplitter, Token};

/// An ordered, case-sensitive token sequence.
///
/// Ordering is lexicographic over tokens, which coincides with ordering
/// the space-joined rendering since tokens never contain whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NgramKey(Vec<String>);

impl NgramKey {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        NgramKey(tokens.into_iter().map(Into::into).collect())
    }

    /// Parses the space-joined rendering.
    pub fn parse(s: &str) -> Self {
        NgramKey::new(s.split(' ').filter(|t| !t.is_empty()))
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NgramKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// One instance per `n`-token window inside a sentence; windows never span sentences.
pub fn extract_ngrams(sentences: &[Vec<Token>], n: usize) -> Vec<(NgramKey, usize)> {
    assert!(n >= 1, "n-gram size must be at least 1");
    sentences
        .iter()
        .enumerate()
        .flat_map(|(idx, sentence)| {
            sentence.windows(n).map(move |w| (NgramKey::new(w.iter().map(|t| t.surface.as_str())), idx))
        })
        .collect()
}

/// The sentence enclosing one n-gram instance.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Context {
    pub bin: usize,
    pub sentence: Arc<str>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NgramRecord {
    pub key: NgramKey,
    pub counts: Vec<u64>,
    pub total: u64,
    pub contexts: Vec<Context>,
}

/// Relative usage per bin, each value in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageTrend(pub Vec<f64>);

impl UsageTrend {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableOptions {
    pub n: usize,
    pub min_total: u64,
    pub include_titles: bool,
}

impl Default for TableOptions {
    fn default() -> Self {
        TableOptions { n: 2, min_total: 5, include_titles: true }
    }
}

#[derive(Debug, Clone)]
pub struct NgramTable {
    n: usize,
    bin_totals: Vec<u64>,
    records: BTreeMap<NgramKey, NgramRecord>,
}

impl NgramTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bin_count(&self) -> usize {
        self.bin_totals.len()
    }

    /// Instances of every n-gram per bin, before the `min_total` filter.
    pub fn bin_totals(&self) -> &[u64] {
        &self.bin_totals
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, key: &NgramKey) -> Option<&NgramRecord> {
        self.records.get(key)
    }

    pub fn records(&self) -> impl ExactSizeIterator<Item = &NgramRecord> + '_ {
        self.records.values()
    }

    pub fn trend(&self, key: &NgramKey) -> Option<UsageTrend> {
        self.get(key).map(|r| relative_usage_trend(r, &self.bin_totals).expect("table totals are consistent"))
    }

    pub fn trends(&self) -> BTreeMap<NgramKey, UsageTrend> {
        self.records
            .iter()
            .map(|(k, r)| {
                let trend = relative_usage_trend(r, &self.bin_totals).expect("table totals are consistent");
                (k.clone(), trend)
            })
            .collect()
    }
}

#[derive(Default)]
struct Partial {
    counts: HashMap<usize, u64>,
    contexts: Vec<Context>,
}

type PartialTable = (Vec<u64>, HashMap<NgramKey, Partial>);

fn count_document(
    text: &str,
    bin: usize,
    bin_count: usize,
    n: usize,
    splitter: &dyn SentenceSplitter,
) -> PartialTable {
    let mut totals = vec![0; bin_count];
    let mut table: HashMap<NgramKey, Partial> = HashMap::new();
    for sentence in sentences(text, splitter) {
        if sentence.tokens.len() < n {
            continue;
        }
        let shared: Arc<str> = Arc::from(sentence.text);
        for window in sentence.tokens.windows(n) {
            let entry = table.entry(NgramKey::new(window.iter().copied())).or_default();
            *entry.counts.entry(bin).or_default() += 1;
            entry.contexts.push(Context { bin, sentence: Arc::clone(&shared) });
            totals[bin] += 1;
        }
    }
    (totals, table)
}

fn merge(mut a: PartialTable, b: PartialTable) -> PartialTable {
    for (t, x) in a.0.iter_mut().zip(b.0) {
        *t += x;
    }
    for (key, part) in b.1 {
        let entry = a.1.entry(key).or_default();
        for (bin, c) in part.counts {
            *entry.counts.entry(bin).or_default() += c;
        }
        entry.contexts.extend(part.contexts);
    }
    a
}

pub fn build_ngram_table(corpus: &TimeBinnedCorpus, options: TableOptions) -> Result<NgramTable> {
    build_ngram_table_with(corpus, options, &PunctuationSplitter)
}

/// Builds the table with a custom sentence splitter.
///
/// Per-document counts are computed in parallel and merged; merging is
/// commutative and contexts are sorted at the end, so the table does not
/// depend on document order or thread count.
pub fn build_ngram_table_with(
    corpus: &TimeBinnedCorpus,
    options: TableOptions,
    splitter: &dyn SentenceSplitter,
) -> Result<NgramTable> {
    if options.n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    if options.min_total == 0 {
        return Err(Error::Config("min_total must be at least 1".into()));
    }
    let bin_count = corpus.bin_count();
    let docs: Vec<_> = corpus.iter().collect();
    let (bin_totals, partial) = docs
        .par_iter()
        .map(|(bin, doc)| {
            count_document(&doc.analysis_text(options.include_titles), *bin, bin_count, options.n, splitter)
        })
        .reduce(|| (vec![0; bin_count], HashMap::new()), merge);

    let records = partial
        .into_iter()
        .filter_map(|(key, part)| {
            let mut counts = vec![0; bin_count];
            for (bin, c) in part.counts {
                counts[bin] = c;
            }
            let total: u64 = counts.iter().sum();
            if total < options.min_total {
                return None;
            }
            let mut contexts = part.contexts;
            contexts.sort_unstable();
            Some((key.clone(), NgramRecord { key, counts, total, contexts }))
        })
        .collect();

    Ok(NgramTable { n: options.n, bin_totals, records })
}

/// Share of all n-gram instances in each bin that belong to `record`. Empty bins yield 0.
pub fn relative_usage_trend(record: &NgramRecord, bin_totals: &[u64]) -> Result<UsageTrend> {
    if record.counts.len() != bin_totals.len() {
        return Err(Error::Consistency(format!(
            "`{}` has {} bins, totals have {}",
            record.key,
            record.counts.len(),
            bin_totals.len()
        )));
    }
    record
        .counts
        .iter()
        .zip(bin_totals)
        .enumerate()
        .map(|(t, (&c, &total))| {
            if c > total {
                Err(Error::Consistency(format!(
                    "`{}` counts {c} instances in bin {t} but the bin holds {total}",
                    record.key
                )))
            } else if total == 0 {
                Ok(0.0)
            } else {
                Ok(c as f64 / total as f64)
            }
        })
        .collect::<Result<_>>()
        .map(UsageTrend)
}

pub fn contexts_of(record: &NgramRecord) -> Vec<&str> {
    record.contexts.iter().map(|c| &*c.sentence).collect()
}
