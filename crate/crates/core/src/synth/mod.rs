//! Synthetic corpora with planted topical bursts.
//!
//! Background sentences are drawn from a closed vocabulary of invented
//! words (all beginning with `x` followed by a consonant) so they never
//! overlap real topic vocabulary. During an event window a share of each
//! document's sentences carries one of the event's burst phrases, and the
//! generator records exactly how many phrases it planted per bin.

mod oracle;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{to_jsonl, Document, Granularity, TimeBinning};
use crate::error::{Error, Result};
use crate::tokenize::{sentences, words, PunctuationSplitter};

pub use oracle::{oracle_count, Oracle};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DocsPerBin {
    Uniform(usize),
    PerBin(Vec<usize>),
}

impl DocsPerBin {
    fn get(&self, bin: usize) -> usize {
        match self {
            DocsPerBin::Uniform(n) => *n,
            DocsPerBin::PerBin(v) => v[bin],
        }
    }
}

/// Inclusive integer range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRange {
    pub min: usize,
    pub max: usize,
}

impl SizeRange {
    pub fn new(min: usize, max: usize) -> Self {
        SizeRange { min, max }
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        rng.gen_range(self.min..=self.max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedEvent {
    pub topic_id: String,
    pub phrases: Vec<String>,
    pub start_bin: usize,
    pub duration: usize,
    /// Target share of a document's sentences that carry a burst phrase.
    pub intensity: f64,
}

impl PlantedEvent {
    fn active(&self, bin: usize) -> bool {
        (self.start_bin..self.start_bin + self.duration).contains(&bin)
    }
}

fn default_start_month() -> String {
    "2016-01".into()
}

fn default_vocab_size() -> usize {
    200
}

fn default_sentences() -> SizeRange {
    SizeRange::new(6, 10)
}

fn default_sentence_length() -> SizeRange {
    SizeRange::new(6, 14)
}

fn default_ngram_size() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub seed: u64,
    pub bin_count: usize,
    /// First bin, `YYYY-MM`. Bins are months.
    #[serde(default = "default_start_month")]
    pub start_month: String,
    pub docs_per_bin: DocsPerBin,
    #[serde(default = "default_vocab_size")]
    pub vocab_size: usize,
    #[serde(default = "default_sentences")]
    pub sentences_per_doc: SizeRange,
    #[serde(default = "default_sentence_length")]
    pub sentence_length: SizeRange,
    /// Burst phrases must tokenize to at least this many tokens.
    #[serde(default = "default_ngram_size")]
    pub ngram_size: usize,
    #[serde(default)]
    pub events: Vec<PlantedEvent>,
}

impl SynthSpec {
    /// A spec with defaults and no events.
    pub fn new(seed: u64, bin_count: usize, docs_per_bin: usize) -> Self {
        SynthSpec {
            seed,
            bin_count,
            start_month: default_start_month(),
            docs_per_bin: DocsPerBin::Uniform(docs_per_bin),
            vocab_size: default_vocab_size(),
            sentences_per_doc: default_sentences(),
            sentence_length: default_sentence_length(),
            ngram_size: default_ngram_size(),
            events: Vec::new(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Synth(e.to_string()))
    }

    pub fn binning(&self) -> Result<TimeBinning> {
        let start = NaiveDate::parse_from_str(&format!("{}-01", self.start_month), "%Y-%m-%d")
            .map_err(|_| Error::Synth(format!("invalid start_month `{}`", self.start_month)))?;
        TimeBinning::with_bins(Granularity::Month, start, self.bin_count)
            .map_err(|_| Error::Synth("bin_count must be at least 1".into()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Synth(m));
        if self.bin_count == 0 {
            return bad("bin_count must be at least 1".into());
        }
        match &self.docs_per_bin {
            DocsPerBin::Uniform(0) => return bad("docs_per_bin must be at least 1".into()),
            DocsPerBin::PerBin(v) if v.len() != self.bin_count => {
                return bad(format!("docs_per_bin lists {} bins, expected {}", v.len(), self.bin_count))
            }
            DocsPerBin::PerBin(v) if v.contains(&0) => {
                return bad("docs_per_bin must be at least 1 in every bin".into())
            }
            _ => {}
        }
        if self.vocab_size == 0 {
            return bad("vocab_size must be at least 1".into());
        }
        for (name, r) in
            [("sentences_per_doc", self.sentences_per_doc), ("sentence_length", self.sentence_length)]
        {
            if r.min == 0 || r.min > r.max {
                return bad(format!("{name} must satisfy 1 <= min <= max"));
            }
        }
        if self.ngram_size == 0 {
            return bad("ngram_size must be at least 1".into());
        }
        for e in &self.events {
            if !(e.intensity > 0.0 && e.intensity <= 1.0) {
                return bad(format!("event `{}`: intensity must be in (0, 1]", e.topic_id));
            }
            if e.duration == 0 || e.start_bin + e.duration > self.bin_count {
                return bad(format!("event `{}`: window outside [0, {})", e.topic_id, self.bin_count));
            }
            if e.phrases.is_empty() {
                return bad(format!("event `{}`: no burst phrases", e.topic_id));
            }
            for p in &e.phrases {
                let s = sentences(p, &PunctuationSplitter);
                if s.len() != 1 || s[0].tokens.len() < self.ngram_size {
                    return bad(format!(
                        "event `{}`: phrase `{p}` must be a single sentence of at least {} tokens",
                        e.topic_id, self.ngram_size
                    ));
                }
            }
        }
        self.binning()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedPhrase {
    pub topic_id: String,
    pub phrase: String,
    pub counts: Vec<u64>,
}

/// Exact planted phrase counts per bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub bin_labels: Vec<String>,
    pub phrases: Vec<PlantedPhrase>,
    pub topics: BTreeMap<String, Vec<u64>>,
}

impl GroundTruth {
    /// Planted phrases per bin for a topic; all zeros when nothing was planted.
    pub fn topic_counts(&self, topic_id: &str) -> Vec<u64> {
        self.topics.get(topic_id).cloned().unwrap_or_else(|| vec![0; self.bin_labels.len()])
    }
}

#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub binning: TimeBinning,
    pub documents: Vec<Document>,
    pub truth: GroundTruth,
    pub vocabulary: Vec<String>,
}

impl SynthCorpus {
    pub fn to_jsonl(&self) -> String {
        to_jsonl(&self.documents)
    }

    pub fn truth_json(&self) -> String {
        serde_json::to_string_pretty(&self.truth).expect("serializable") + "\n"
    }

    /// Writes the corpus to `path` and the ground truth next to it
    /// (`corpus.jsonl` → `corpus.truth.json`). Returns the truth path.
    pub fn write(&self, path: impl AsRef<Path>) -> Result<PathBuf> {
        let path = path.as_ref();
        std::fs::write(path, self.to_jsonl()).map_err(|e| Error::io(path, e))?;
        let truth = truth_path(path);
        std::fs::write(&truth, self.truth_json()).map_err(|e| Error::io(&truth, e))?;
        Ok(truth)
    }
}

pub fn truth_path(corpus: &Path) -> PathBuf {
    let stem =
        corpus.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "corpus".into());
    corpus.with_file_name(format!("{stem}.truth.json"))
}

const CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";

fn background_vocabulary(size: usize, excluded: &BTreeSet<String>, rng: &mut impl Rng) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut vocab = Vec::with_capacity(size);
    while vocab.len() < size {
        let syllables = rng.gen_range(1..=3);
        let mut w = String::from("x");
        for _ in 0..syllables {
            w.push(*CONSONANTS.choose(rng).expect("non-empty") as char);
            w.push(*VOWELS.choose(rng).expect("non-empty") as char);
        }
        if !excluded.contains(&w) && seen.insert(w.clone()) {
            vocab.push(w);
        }
    }
    vocab
}

#[allow(clippy::needless_range_loop)]
pub fn generate_corpus(spec: &SynthSpec) -> Result<SynthCorpus> {
    spec.validate()?;
    let binning = spec.binning()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let excluded: BTreeSet<String> = spec
        .events
        .iter()
        .flat_map(|e| e.phrases.iter())
        .flat_map(|p| words(p).map(str::to_lowercase).collect::<Vec<_>>())
        .collect();
    let vocabulary = background_vocabulary(spec.vocab_size, &excluded, &mut rng);

    let m = spec.bin_count;
    let mut phrase_counts: Vec<Vec<Vec<u64>>> =
        spec.events.iter().map(|e| vec![vec![0; m]; e.phrases.len()]).collect();

    let mut documents = Vec::new();
    for bin in 0..m {
        let start = binning.bin_start(bin);
        let active: Vec<usize> = (0..spec.events.len()).filter(|&i| spec.events[i].active(bin)).collect();
        for d in 0..spec.docs_per_bin.get(bin) {
            let day = rng.gen_range(0..28);
            let n_sentences = spec.sentences_per_doc.sample(&mut rng);

            // Slot i of `plan` holds the event planted in sentence i, if any.
            let mut plan: Vec<Option<usize>> = Vec::with_capacity(n_sentences);
            for &e in &active {
                let k = ((spec.events[e].intensity * n_sentences as f64).round() as usize).max(1);
                plan.extend(std::iter::repeat_n(Some(e), k));
            }
            if plan.len() > n_sentences {
                return Err(Error::Synth(format!(
                    "bin {bin}: events need {} burst sentences but documents have {n_sentences}",
                    plan.len()
                )));
            }
            plan.resize(n_sentences, None);
            plan.shuffle(&mut rng);

            let mut text = String::new();
            for slot in plan {
                let len = spec.sentence_length.sample(&mut rng);
                let mut parts: Vec<&str> =
                    (0..len).map(|_| vocabulary[rng.gen_range(0..vocabulary.len())].as_str()).collect();
                if let Some(e) = slot {
                    let event = &spec.events[e];
                    let p = rng.gen_range(0..event.phrases.len());
                    let pos = rng.gen_range(0..=parts.len());
                    parts.insert(pos, event.phrases[p].trim());
                    phrase_counts[e][p][bin] += 1;
                }
                if !text.is_empty() {
                    text.push(' ');
                }
                text.push_str(&parts.join(" "));
                text.push('.');
            }
            documents.push(Document::new(
                format!("doc-{bin:03}-{d:04}"),
                start + chrono::Duration::days(day),
                text,
            ));
        }
    }

    let mut phrases = Vec::new();
    let mut topics: BTreeMap<String, Vec<u64>> = BTreeMap::new();
    for (e, counts) in spec.events.iter().zip(phrase_counts) {
        let topic = topics.entry(e.topic_id.clone()).or_insert_with(|| vec![0; m]);
        for (phrase, c) in e.phrases.iter().zip(counts) {
            for (acc, x) in topic.iter_mut().zip(&c) {
                *acc += x;
            }
            phrases.push(PlantedPhrase { topic_id: e.topic_id.clone(), phrase: phrase.clone(), counts: c });
        }
    }

    Ok(SynthCorpus {
        truth: GroundTruth { bin_labels: binning.labels(), phrases, topics },
        binning,
        documents,
        vocabulary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(start: usize, intensity: f64) -> PlantedEvent {
        PlantedEvent {
            topic_id: "political_events".into(),
            phrases: vec!["repeat election".into()],
            start_bin: start,
            duration: 2,
            intensity,
        }
    }

    #[test]
    fn no_events_plants_nothing() {
        let c = generate_corpus(&SynthSpec::new(1, 4, 3)).unwrap();
        assert_eq!(c.documents.len(), 12);
        assert!(c.truth.phrases.is_empty());
        assert_eq!(c.truth.topic_counts("political_events"), [0; 4]);
    }

    #[test]
    fn same_seed_same_corpus() {
        let mut spec = SynthSpec::new(7, 5, 4);
        spec.events.push(event(2, 0.5));
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        assert_eq!(a.to_jsonl(), b.to_jsonl());
        assert_eq!(a.truth, b.truth);
        spec.seed = 8;
        assert_ne!(generate_corpus(&spec).unwrap().to_jsonl(), a.to_jsonl());
    }

    #[test]
    fn planted_fraction_matches_intensity() {
        let mut spec = SynthSpec::new(3, 8, 10);
        spec.sentences_per_doc = SizeRange::new(10, 10);
        spec.events.push(event(5, 0.5));
        let c = generate_corpus(&spec).unwrap();
        let counts = &c.truth.phrases[0].counts;
        assert_eq!(counts[..5], [0; 5]);
        assert_eq!(counts[5], 50, "5 of 10 sentences in each of 10 docs");
        assert_eq!(counts[6], 50);
        assert_eq!(counts[7], 0);
    }

    #[test]
    fn overlapping_events_can_be_infeasible() {
        let mut spec = SynthSpec::new(3, 4, 2);
        spec.events.push(event(1, 0.8));
        spec.events.push(PlantedEvent { topic_id: "other".into(), ..event(1, 0.8) });
        assert!(matches!(generate_corpus(&spec), Err(Error::Synth(_))));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = SynthSpec::new(1, 4, 2);
        spec.events.push(event(3, 0.5));
        assert!(spec.validate().is_err(), "window past last bin");
        spec.events[0] = event(0, 1.5);
        assert!(spec.validate().is_err(), "intensity above 1");
        spec.events[0] = PlantedEvent { phrases: vec!["single".into()], ..event(0, 0.5) };
        assert!(spec.validate().is_err(), "phrase shorter than n");
        assert!(SynthSpec::new(1, 0, 2).validate().is_err());
    }

    #[test]
    fn background_vocabulary_is_disjoint_from_phrases() {
        let mut spec = SynthSpec::new(11, 3, 2);
        spec.events.push(event(0, 0.3));
        let c = generate_corpus(&spec).unwrap();
        assert_eq!(c.vocabulary.len(), spec.vocab_size);
        assert!(c.vocabulary.iter().all(|w| w.starts_with('x') && w != "repeat" && w != "election"));
    }

    #[test]
    fn spec_json_defaults() {
        let spec = SynthSpec::from_json(r#"{"seed": 5, "bin_count": 3, "docs_per_bin": [1, 2, 3]}"#).unwrap();
        assert_eq!(spec.vocab_size, 200);
        assert_eq!(generate_corpus(&spec).unwrap().documents.len(), 6);
    }

    #[test]
    fn truth_path_next_to_corpus() {
        assert_eq!(truth_path(Path::new("/a/corpus.jsonl")), Path::new("/a/corpus.truth.json"));
    }
}
