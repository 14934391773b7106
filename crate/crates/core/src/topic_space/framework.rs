use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::{sentences, words, PunctuationSplitter};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Topic {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub row: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<String>,
    #[serde(default)]
    pub definition: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub ground_truth: Vec<String>,
}

impl Topic {
    fn has_material(&self) -> bool {
        !self.definition.trim().is_empty()
            || self.keywords.iter().any(|k| !k.trim().is_empty())
            || self.ground_truth.iter().any(|g| !g.trim().is_empty())
    }

    /// Definition, keywords and ground truth, one block each, separated by blank lines.
    pub fn base_document(&self) -> String {
        std::iter::once(self.definition.as_str())
            .chain(self.keywords.iter().map(String::as_str))
            .chain(self.ground_truth.iter().map(String::as_str))
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}

/// Row/column arrangement of a framework. `cells[r * columns + c]` is a topic index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridLayout {
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub cells: Vec<usize>,
}

impl GridLayout {
    /// Rearranges per-topic values (framework order) into row-major rows.
    pub fn arrange(&self, values: &[f64]) -> Vec<Vec<f64>> {
        self.cells.chunks(self.columns.len()).map(|row| row.iter().map(|&i| values[i]).collect()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFramework")]
pub struct TopicFramework {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
    pub topics: Vec<Topic>,
    #[serde(skip)]
    grid: Option<GridLayout>,
}

#[derive(Deserialize)]
struct RawFramework {
    name: String,
    #[serde(default)]
    rows: Option<Vec<String>>,
    #[serde(default)]
    columns: Option<Vec<String>>,
    topics: Vec<Topic>,
}

impl TryFrom<RawFramework> for TopicFramework {
    type Error = Error;

    fn try_from(raw: RawFramework) -> Result<Self> {
        TopicFramework::new(raw.name, raw.rows, raw.columns, raw.topics)
    }
}

impl TopicFramework {
    pub fn new(
        name: impl Into<String>,
        rows: Option<Vec<String>>,
        columns: Option<Vec<String>>,
        topics: Vec<Topic>,
    ) -> Result<Self> {
        if topics.is_empty() {
            return Err(Error::Framework("no topics".into()));
        }
        let mut ids = HashSet::new();
        for t in &topics {
            if t.id.trim().is_empty() {
                return Err(Error::Framework("topic with empty id".into()));
            }
            if !ids.insert(t.id.as_str()) {
                return Err(Error::Framework(format!("duplicate topic id `{}`", t.id)));
            }
            if !t.has_material() {
                return Err(Error::Framework(format!(
                    "topic `{}` has no definition, keywords or ground truth",
                    t.id
                )));
            }
        }
        let grid = match (&rows, &columns) {
            (Some(r), Some(c)) => Some(Self::layout(r, c, &topics)?),
            (None, None) => {
                if let Some(t) = topics.iter().find(|t| t.row.is_some() || t.column.is_some()) {
                    return Err(Error::Framework(format!(
                        "topic `{}` declares a grid position but the framework has no rows/columns",
                        t.id
                    )));
                }
                None
            }
            _ => return Err(Error::Framework("rows and columns must be declared together".into())),
        };
        Ok(TopicFramework { name: name.into(), rows, columns, topics, grid })
    }

    fn layout(rows: &[String], columns: &[String], topics: &[Topic]) -> Result<GridLayout> {
        let index_of = |labels: &[String], what: &str| -> Result<HashMap<String, usize>> {
            let mut map = HashMap::new();
            for (i, l) in labels.iter().enumerate() {
                if map.insert(l.clone(), i).is_some() {
                    return Err(Error::Framework(format!("duplicate {what} label `{l}`")));
                }
            }
            Ok(map)
        };
        let row_idx = index_of(rows, "row")?;
        let col_idx = index_of(columns, "column")?;
        if rows.is_empty() || columns.is_empty() {
            return Err(Error::Framework("declared grid has no rows or columns".into()));
        }
        if topics.len() != rows.len() * columns.len() {
            return Err(Error::Framework(format!(
                "incomplete grid: {} topics for {} rows x {} columns",
                topics.len(),
                rows.len(),
                columns.len()
            )));
        }
        let mut cells = vec![usize::MAX; topics.len()];
        for (i, t) in topics.iter().enumerate() {
            let (Some(r), Some(c)) = (&t.row, &t.column) else {
                return Err(Error::Framework(format!("topic `{}` lacks a row or column", t.id)));
            };
            let r = *row_idx
                .get(r)
                .ok_or_else(|| Error::Framework(format!("topic `{}`: unknown row `{r}`", t.id)))?;
            let c = *col_idx
                .get(c)
                .ok_or_else(|| Error::Framework(format!("topic `{}`: unknown column `{c}`", t.id)))?;
            let cell = &mut cells[r * columns.len() + c];
            if *cell != usize::MAX {
                return Err(Error::Framework(format!(
                    "topics `{}` and `{}` share a grid cell",
                    topics[*cell].id, t.id
                )));
            }
            *cell = i;
        }
        Ok(GridLayout { rows: rows.to_vec(), columns: columns.to_vec(), cells })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Framework(e.to_string()))
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    pub fn topic_ids(&self) -> Vec<&str> {
        self.topics.iter().map(|t| t.id.as_str()).collect()
    }

    pub fn topic_index(&self, id: &str) -> Option<usize> {
        self.topics.iter().position(|t| t.id == id)
    }

    pub fn grid(&self) -> Option<&GridLayout> {
        self.grid.as_ref()
    }
}

pub fn load_framework(path: impl AsRef<Path>) -> Result<TopicFramework> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TopicFramework::from_json(&s)
}

/// Term → synonyms. Keys are lowercased on load.
pub type Lexicon = BTreeMap<String, Vec<String>>;

pub fn parse_lexicon(s: &str) -> Result<Lexicon> {
    let raw: BTreeMap<String, Vec<String>> =
        serde_json::from_str(s).map_err(|e| Error::Config(format!("lexicon: {e}")))?;
    let mut lexicon = Lexicon::new();
    for (term, syns) in raw {
        lexicon.entry(term.to_lowercase()).or_default().extend(syns);
    }
    Ok(lexicon)
}

pub fn load_lexicon(path: impl AsRef<Path>) -> Result<Lexicon> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&s)
}

fn lower_words(s: &str) -> Vec<String> {
    words(s).map(str::to_lowercase).collect()
}

fn contains_run(segments: &[Vec<String>], needle: &[String]) -> bool {
    !needle.is_empty() && segments.iter().any(|seg| seg.windows(needle.len()).any(|w| w == needle))
}

/// Appends every lexicon synonym of every term found in `text`, each on its
/// own line block, until no new synonym applies.
///
/// Synonyms already present are not repeated, and synonyms that are
/// themselves lexicon terms are expanded in turn, so the operation is
/// idempotent.
pub fn expand_text(text: &str, lexicon: &Lexicon) -> String {
    let mut segments: Vec<Vec<String>> = sentences(text, &PunctuationSplitter)
        .into_iter()
        .map(|s| s.tokens.iter().map(|t| t.to_lowercase()).collect())
        .collect();
    let terms: Vec<(Vec<String>, &Vec<String>)> =
        lexicon.iter().map(|(term, syns)| (lower_words(term), syns)).collect();

    let mut appended: Vec<&str> = Vec::new();
    loop {
        let mut changed = false;
        for (term, syns) in &terms {
            if !contains_run(&segments, term) {
                continue;
            }
            for syn in syns.iter() {
                let toks = lower_words(syn);
                if toks.is_empty() || contains_run(&segments, &toks) {
                    continue;
                }
                segments.push(toks);
                appended.push(syn.trim());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if appended.is_empty() {
        return text.to_string();
    }
    let mut out = text.to_string();
    for syn in appended {
        if !out.is_empty() {
            out.push_str("\n\n");
        }
        out.push_str(syn);
    }
    out
}

/// The topic's TF-IDF source document: its base material plus lexicon synonyms.
pub fn expand_topic_document(topic: &Topic, lexicon: Option<&Lexicon>) -> String {
    let base = topic.base_document();
    match lexicon {
        Some(lex) => expand_text(&base, lex),
        None => base,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topic(id: &str, def: &str) -> Topic {
        Topic {
            id: id.into(),
            row: None,
            column: None,
            definition: def.into(),
            keywords: vec![],
            ground_truth: vec![],
        }
    }

    fn lex(pairs: &[(&str, &[&str])]) -> Lexicon {
        pairs.iter().map(|(k, v)| (k.to_string(), v.iter().map(|s| s.to_string()).collect())).collect()
    }

    fn count_word(text: &str, w: &str) -> usize {
        words(text).filter(|x| x.eq_ignore_ascii_case(w)).count()
    }

    #[test]
    fn flat_single_topic_is_valid() {
        let f = TopicFramework::from_json(
            r#"{"name":"f","topics":[{"id":"a","definition":"d","keywords":[],"ground_truth":[]}]}"#,
        )
        .unwrap();
        assert_eq!(f.len(), 1);
        assert!(f.grid().is_none());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let err = TopicFramework::new("f", None, None, vec![topic("a", "x"), topic("a", "y")]).unwrap_err();
        assert!(err.to_string().contains("duplicate topic id"));
    }

    #[test]
    fn empty_material_rejected() {
        let mut t = topic("a", "  ");
        t.keywords = vec!["".into()];
        assert!(TopicFramework::new("f", None, None, vec![t]).is_err());
    }

    #[test]
    fn incomplete_grid_rejected() {
        let mut a = topic("a", "x");
        a.row = Some("r1".into());
        a.column = Some("c1".into());
        let err =
            TopicFramework::new("f", Some(vec!["r1".into(), "r2".into()]), Some(vec!["c1".into()]), vec![a])
                .unwrap_err();
        assert!(err.to_string().contains("incomplete grid"));
    }

    #[test]
    fn grid_cells_follow_labels() {
        let mk = |id: &str, r: &str, c: &str| {
            let mut t = topic(id, id);
            t.row = Some(r.into());
            t.column = Some(c.into());
            t
        };
        let f = TopicFramework::new(
            "f",
            Some(vec!["R1".into(), "R2".into()]),
            Some(vec!["C1".into(), "C2".into()]),
            vec![mk("b", "R2", "C1"), mk("a", "R1", "C1"), mk("d", "R2", "C2"), mk("c", "R1", "C2")],
        )
        .unwrap();
        let grid = f.grid().unwrap();
        assert_eq!(grid.arrange(&[10.0, 20.0, 30.0, 40.0]), [[20.0, 40.0], [10.0, 30.0]]);
    }

    #[test]
    fn shared_cell_rejected() {
        let mk = |id: &str| {
            let mut t = topic(id, id);
            t.row = Some("R".into());
            t.column = Some("C".into());
            t
        };
        let err = TopicFramework::new(
            "f",
            Some(vec!["R".into()]),
            Some(vec!["C".into(), "D".into()]),
            vec![mk("a"), mk("b")],
        )
        .unwrap_err();
        assert!(err.to_string().contains("share a grid cell"));
    }

    #[test]
    fn synonyms_appended_once() {
        let t = topic("t", "election results");
        let out = expand_topic_document(&t, Some(&lex(&[("election", &["poll", "vote"])])));
        assert_eq!(count_word(&out, "poll"), 1);
        assert_eq!(count_word(&out, "vote"), 1);
    }

    #[test]
    fn no_lexicon_concatenates() {
        let mut t = topic("t", "definition here");
        t.keywords = vec!["kw1".into(), "kw2".into()];
        t.ground_truth = vec!["Ground truth text.".into()];
        assert_eq!(expand_topic_document(&t, None), "definition here\n\nkw1\n\nkw2\n\nGround truth text.");
    }

    #[test]
    fn present_synonym_not_duplicated() {
        let t = topic("t", "election poll");
        let out = expand_topic_document(&t, Some(&lex(&[("election", &["poll", "ballot"])])));
        assert_eq!(count_word(&out, "poll"), 1);
        assert_eq!(count_word(&out, "ballot"), 1);
    }

    #[test]
    fn expansion_is_idempotent_with_chained_synonyms() {
        let l = lex(&[("election", &["poll"]), ("poll", &["survey", "ballot"]), ("ballot", &["election"])]);
        let once = expand_text("The election day", &l);
        assert_eq!(expand_text(&once, &l), once);
        assert_eq!(count_word(&once, "survey"), 1);
        assert_eq!(count_word(&once, "election"), 1);
    }

    #[test]
    fn multiword_terms_and_synonyms() {
        let l = lex(&[("polling station", &["voting centre"])]);
        let out = expand_text("At the polling station today", &l);
        assert!(out.ends_with("voting centre"));
        assert_eq!(expand_text("polling or station", &l), "polling or station");
    }

    #[test]
    fn lexicon_keys_lowercased() {
        let l = parse_lexicon(r#"{"Election": ["poll"]}"#).unwrap();
        assert_eq!(l["election"], ["poll"]);
    }
}
