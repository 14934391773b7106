//! Corpus loading and time binning.
//!
//! A corpus is a JSONL file of dated documents. Documents are partitioned
//! into contiguous, equally sized time bins (month, ISO week or day) that
//! span the earliest through the latest publication date. Empty bins are
//! kept so every downstream trend shares one uniform time axis.

use std::collections::HashSet;
use std::fmt;
use std::io::BufRead;
use std::path::Path;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub title: Option<String>,
    pub text: String,
}

impl Document {
    pub fn new(id: impl Into<String>, date: NaiveDate, text: impl Into<String>) -> Self {
        Document { id: id.into(), date, title: None, text: text.into() }
    }

    pub fn with_title(mut self, title: impl Into<String>) -> Self {
        self.title = Some(title.into());
        self
    }

    /// Text that enters the analysis. A title, when included, is separated
    /// from the body by a blank line so it forms its own sentence.
    pub fn analysis_text(&self, include_title: bool) -> String {
        match &self.title {
            Some(title) if include_title && !title.trim().is_empty() => {
                format!("{}\n\n{}", title.trim_end(), self.text)
            }
            _ => self.text.clone(),
        }
    }
}

/// Field names used when reading corpus records.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSchema {
    pub id_field: String,
    pub date_field: String,
    pub title_field: String,
    pub text_field: String,
}

impl Default for CorpusSchema {
    fn default() -> Self {
        CorpusSchema {
            id_field: "id".into(),
            date_field: "date".into(),
            title_field: "title".into(),
            text_field: "text".into(),
        }
    }
}

pub fn load_corpus(path: impl AsRef<Path>, schema: &CorpusSchema) -> Result<Vec<Document>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(std::io::BufReader::new(file), schema).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        e => e,
    })
}

/// Parses JSONL records. Blank lines are skipped; unknown keys are ignored.
pub fn read_corpus(reader: impl BufRead, schema: &CorpusSchema) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|e| Error::io("<corpus>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let doc = parse_record(&line, line_no, schema)?;
        if !seen.insert(doc.id.clone()) {
            return Err(Error::DuplicateId(doc.id));
        }
        docs.push(doc);
    }
    if docs.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(docs)
}

fn parse_record(line: &str, line_no: usize, schema: &CorpusSchema) -> Result<Document> {
    let parse_err = |message: String| Error::Parse { line: line_no, message };
    let value: Value = serde_json::from_str(line).map_err(|e| parse_err(e.to_string()))?;
    let obj = value.as_object().ok_or_else(|| parse_err("record is not a JSON object".into()))?;
    let string_field = |name: &str| -> Result<Option<String>> {
        match obj.get(name) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(_) => Err(parse_err(format!("field `{name}` must be a string"))),
        }
    };

    let id =
        string_field(&schema.id_field)?.ok_or_else(|| parse_err(format!("missing `{}`", schema.id_field)))?;
    if id.trim().is_empty() {
        return Err(parse_err("empty document id".into()));
    }
    let raw_date = string_field(&schema.date_field)?
        .ok_or_else(|| Error::InvalidDate { id: id.clone(), value: String::new() })?;
    let date = NaiveDate::parse_from_str(raw_date.trim(), DATE_FORMAT)
        .map_err(|_| Error::InvalidDate { id: id.clone(), value: raw_date.clone() })?;
    let title = string_field(&schema.title_field)?;
    let text = string_field(&schema.text_field)?.unwrap_or_default();
    if text.trim().is_empty() {
        return Err(Error::InvalidDocument { id, message: "empty text".into() });
    }
    Ok(Document { id, date, title, text })
}

/// Serialized corpus record, the inverse of [`read_corpus`] with the default schema.
#[derive(Debug, Serialize, Deserialize)]
pub struct CorpusRecord<'a> {
    pub id: &'a str,
    pub date: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub title: Option<&'a str>,
    pub text: &'a str,
}

impl<'a> From<&'a Document> for CorpusRecord<'a> {
    fn from(doc: &'a Document) -> Self {
        CorpusRecord {
            id: &doc.id,
            date: doc.date.format(DATE_FORMAT).to_string(),
            title: doc.title.as_deref(),
            text: &doc.text,
        }
    }
}

pub fn to_jsonl(docs: &[Document]) -> String {
    let mut out = String::new();
    for doc in docs {
        // CorpusRecord contains only strings; serialization cannot fail.
        out.push_str(&serde_json::to_string(&CorpusRecord::from(doc)).expect("serializable"));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    #[default]
    Month,
    Week,
    Day,
}

impl fmt::Display for Granularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Granularity::Month => "month",
            Granularity::Week => "week",
            Granularity::Day => "day",
        })
    }
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "month" => Ok(Granularity::Month),
            "week" => Ok(Granularity::Week),
            "day" => Ok(Granularity::Day),
            other => Err(Error::Config(format!("unknown bin granularity `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeBinning {
    granularity: Granularity,
    origin: NaiveDate,
    bin_count: usize,
}

fn month_ordinal(date: NaiveDate) -> i64 {
    i64::from(date.year()) * 12 + i64::from(date.month0())
}

impl TimeBinning {
    /// Binning whose first bin contains `first` and whose last bin contains `last`.
    pub fn spanning(granularity: Granularity, first: NaiveDate, last: NaiveDate) -> Result<Self> {
        if last < first {
            return Err(Error::Config(format!("binning span ends ({last}) before it starts ({first})")));
        }
        let origin = Self::bin_start_of(granularity, first);
        let mut binning = TimeBinning { granularity, origin, bin_count: 1 };
        binning.bin_count = binning.offset(last) as usize + 1;
        Ok(binning)
    }

    /// `bin_count` consecutive bins starting at the bin that contains `start`.
    pub fn with_bins(granularity: Granularity, start: NaiveDate, bin_count: usize) -> Result<Self> {
        if bin_count == 0 {
            return Err(Error::Config("bin count must be at least 1".into()));
        }
        Ok(TimeBinning { granularity, origin: Self::bin_start_of(granularity, start), bin_count })
    }

    fn bin_start_of(granularity: Granularity, date: NaiveDate) -> NaiveDate {
        match granularity {
            Granularity::Month => date.with_day(1).expect("day 1 exists"),
            Granularity::Week => date - Duration::days(i64::from(date.weekday().num_days_from_monday())),
            Granularity::Day => date,
        }
    }

    fn offset(&self, date: NaiveDate) -> i64 {
        match self.granularity {
            Granularity::Month => month_ordinal(date) - month_ordinal(self.origin),
            Granularity::Week => (date - self.origin).num_days().div_euclid(7),
            Granularity::Day => (date - self.origin).num_days(),
        }
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn origin(&self) -> NaiveDate {
        self.origin
    }

    pub fn bin_count(&self) -> usize {
        self.bin_count
    }

    pub fn bin_index(&self, date: NaiveDate) -> Option<usize> {
        let offset = self.offset(date);
        (0..self.bin_count as i64).contains(&offset).then_some(offset as usize)
    }

    pub fn bin_start(&self, index: usize) -> NaiveDate {
        match self.granularity {
            Granularity::Month => {
                let ordinal = month_ordinal(self.origin) + index as i64;
                NaiveDate::from_ymd_opt(ordinal.div_euclid(12) as i32, ordinal.rem_euclid(12) as u32 + 1, 1)
                    .expect("valid month")
            }
            Granularity::Week => self.origin + Duration::days(7 * index as i64),
            Granularity::Day => self.origin + Duration::days(index as i64),
        }
    }

    /// `YYYY-MM` for months, the bin's first day (`YYYY-MM-DD`) otherwise.
    pub fn label(&self, index: usize) -> String {
        let start = self.bin_start(index);
        match self.granularity {
            Granularity::Month => start.format("%Y-%m").to_string(),
            Granularity::Week | Granularity::Day => start.format(DATE_FORMAT).to_string(),
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.bin_count).map(|i| self.label(i)).collect()
    }
}

pub fn build_binning(docs: &[Document], granularity: Granularity) -> Result<TimeBinning> {
    let first = docs.iter().map(|d| d.date).min().ok_or(Error::EmptyCorpus)?;
    let last = docs.iter().map(|d| d.date).max().ok_or(Error::EmptyCorpus)?;
    TimeBinning::spanning(granularity, first, last)
}

/// Documents partitioned into bins. Per-bin order follows input order.
#[derive(Debug, Clone)]
pub struct TimeBinnedCorpus {
    binning: TimeBinning,
    documents: Vec<Document>,
    docs_by_bin: Vec<Vec<usize>>,
}

impl TimeBinnedCorpus {
    pub fn binning(&self) -> &TimeBinning {
        &self.binning
    }

    pub fn bin_count(&self) -> usize {
        self.binning.bin_count
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn bin_documents(&self, bin: usize) -> impl Iterator<Item = &Document> + '_ {
        self.docs_by_bin[bin].iter().map(|&i| &self.documents[i])
    }

    pub fn bin_ids(&self, bin: usize) -> Vec<&str> {
        self.bin_documents(bin).map(|d| d.id.as_str()).collect()
    }

    /// `(bin, document)` pairs in bin order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &Document)> + '_ {
        self.docs_by_bin
            .iter()
            .enumerate()
            .flat_map(move |(bin, idxs)| idxs.iter().map(move |&i| (bin, &self.documents[i])))
    }
}

pub fn bin_documents(docs: Vec<Document>, binning: TimeBinning) -> Result<TimeBinnedCorpus> {
    let mut docs_by_bin = vec![Vec::new(); binning.bin_count];
    for (i, doc) in docs.iter().enumerate() {
        let bin = binning
            .bin_index(doc.date)
            .ok_or_else(|| Error::OutOfSpan { id: doc.id.clone(), date: doc.date.to_string() })?;
        docs_by_bin[bin].push(i);
    }
    Ok(TimeBinnedCorpus { binning, documents: docs, docs_by_bin })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        NaiveDate::parse_from_str(s, DATE_FORMAT).unwrap()
    }

    fn doc(id: &str, d: &str) -> Document {
        Document::new(id, date(d), "some text")
    }

    fn read(s: &str) -> Result<Vec<Document>> {
        read_corpus(s.as_bytes(), &CorpusSchema::default())
    }

    #[test]
    fn empty_file_is_an_error() {
        assert!(matches!(read(""), Err(Error::EmptyCorpus)));
        assert!(matches!(read("\n  \n"), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn records_in_file_order() {
        let docs = read(concat!(
            r#"{"id":"b","date":"2017-02-01","text":"x"}"#,
            "\n",
            r#"{"id":"a","date":"2017-01-01","text":"y","extra":3}"#,
            "\n",
            r#"{"id":"c","date":"2017-03-01","title":"T","text":"z"}"#,
            "\n"
        ))
        .unwrap();
        let ids: Vec<_> = docs.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["b", "a", "c"]);
        assert_eq!(docs[2].title.as_deref(), Some("T"));
    }

    #[test]
    fn bad_month_names_record() {
        let err = read(r#"{"id":"r1","date":"2017-13-01","text":"x"}"#).unwrap_err();
        match err {
            Error::InvalidDate { id, value } => {
                assert_eq!(id, "r1");
                assert_eq!(value, "2017-13-01");
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let err = read("{\"id\":\"a\",\"date\":\"2017-01-01\",\"text\":\"x\"}\n{oops").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn duplicate_id_rejected() {
        let err = read(concat!(
            r#"{"id":"a","date":"2017-01-01","text":"x"}"#,
            "\n",
            r#"{"id":"a","date":"2017-01-02","text":"y"}"#
        ))
        .unwrap_err();
        assert!(matches!(err, Error::DuplicateId(ref id) if id == "a"));
    }

    #[test]
    fn blank_text_rejected() {
        let err = read(r#"{"id":"a","date":"2017-01-01","text":"   "}"#).unwrap_err();
        assert!(matches!(err, Error::InvalidDocument { .. }));
    }

    #[test]
    fn title_prepended_as_own_sentence() {
        let d = doc("a", "2017-01-01").with_title("Headline");
        assert_eq!(d.analysis_text(true), "Headline\n\nsome text");
        assert_eq!(d.analysis_text(false), "some text");
    }

    #[test]
    fn jan_2016_to_sep_2018_is_33_months() {
        let docs = [doc("a", "2016-01-15"), doc("b", "2018-09-02")];
        let b = build_binning(&docs, Granularity::Month).unwrap();
        assert_eq!(b.bin_count(), 33);
        assert_eq!(b.label(0), "2016-01");
        assert_eq!(b.label(32), "2018-09");
    }

    #[test]
    fn single_month() {
        let docs = [doc("a", "2017-05-01"), doc("b", "2017-05-31")];
        assert_eq!(build_binning(&docs, Granularity::Month).unwrap().bin_count(), 1);
    }

    #[test]
    fn empty_intermediate_month_kept() {
        let docs = vec![doc("a", "2017-01-31"), doc("b", "2017-03-01")];
        let b = build_binning(&docs, Granularity::Month).unwrap();
        assert_eq!(b.bin_count(), 3);
        let corpus = bin_documents(docs, b).unwrap();
        assert_eq!(corpus.bin_ids(0), ["a"]);
        assert!(corpus.bin_ids(1).is_empty());
        assert_eq!(corpus.bin_ids(2), ["b"]);
    }

    #[test]
    fn empty_doc_list_is_an_error() {
        assert!(matches!(build_binning(&[], Granularity::Month), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn weeks_start_on_monday() {
        // 2017-01-04 is a Wednesday; 2017-01-09 the following Monday.
        let docs = [doc("a", "2017-01-04"), doc("b", "2017-01-09")];
        let b = build_binning(&docs, Granularity::Week).unwrap();
        assert_eq!(b.origin(), date("2017-01-02"));
        assert_eq!(b.bin_count(), 2);
        assert_eq!(b.labels(), ["2017-01-02", "2017-01-09"]);
    }

    #[test]
    fn days() {
        let docs = [doc("a", "2016-02-28"), doc("b", "2016-03-01")];
        let b = build_binning(&docs, Granularity::Day).unwrap();
        assert_eq!(b.bin_count(), 3);
        assert_eq!(b.label(1), "2016-02-29");
    }

    #[test]
    fn same_month_keeps_input_order() {
        let docs = vec![doc("z", "2017-01-20"), doc("y", "2017-01-03")];
        let b = build_binning(&docs, Granularity::Month).unwrap();
        let corpus = bin_documents(docs, b).unwrap();
        assert_eq!(corpus.bin_ids(0), ["z", "y"]);
    }

    #[test]
    fn doc_before_origin_is_out_of_span() {
        let b = TimeBinning::with_bins(Granularity::Month, date("2017-02-01"), 2).unwrap();
        let err = bin_documents(vec![doc("early", "2017-01-31")], b).unwrap_err();
        assert!(matches!(err, Error::OutOfSpan { ref id, .. } if id == "early"));
    }

    #[test]
    fn jsonl_round_trip() {
        let docs = vec![doc("a", "2017-01-01").with_title("T \"q\""), doc("b", "2017-02-01")];
        let back = read(&to_jsonl(&docs)).unwrap();
        assert_eq!(back, docs);
    }
}
