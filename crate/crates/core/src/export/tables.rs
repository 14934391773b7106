use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::association::{Member, TopicAssociation};
use crate::error::{Error, Result};
use crate::ngram::{NgramKey, NgramTable, UsageTrend};
use crate::salience::{SalienceMatrix, TopicTrend};
use crate::topic_space::{SimilarityMatrix, TopicFramework};

/// Shortest decimal that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Consistency(format!("csv write: {e}")),
        _ => Error::Parse { line: e.position().map_or(0, |p| p.line() as usize), message: e.to_string() },
    }
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse { line, message: format!("not a number: `{s}`") })
}

/// `ngram,total,<bin labels...>`, one row per n-gram in n-gram order.
pub fn write_ngram_trends(w: impl Write, table: &NgramTable, labels: &[String]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["ngram".to_string(), "total".to_string()];
    header.extend(labels.iter().cloned());
    wtr.write_record(&header).map_err(csv_err)?;
    for record in table.records() {
        let trend = table.trend(&record.key).expect("record exists");
        let mut row = vec![record.key.to_string(), record.total.to_string()];
        row.extend(trend.values().iter().map(|&v| fmt_f64(v)));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Consistency(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTable {
    pub labels: Vec<String>,
    pub totals: BTreeMap<NgramKey, u64>,
    pub trends: BTreeMap<NgramKey, UsageTrend>,
}

pub fn read_ngram_trends(r: impl Read) -> Result<TrendTable> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.len() < 2 || &header[0] != "ngram" || &header[1] != "total" {
        return Err(Error::Parse { line: 1, message: "expected header `ngram,total,...`".into() });
    }
    let labels: Vec<String> = header.iter().skip(2).map(String::from).collect();
    let mut totals = BTreeMap::new();
    let mut trends = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let key = NgramKey::parse(&rec[0]);
        let total =
            rec[1].parse().map_err(|_| Error::Parse { line, message: format!("bad total `{}`", &rec[1]) })?;
        let values = rec.iter().skip(2).map(|s| parse_f64(s, line)).collect::<Result<Vec<_>>>()?;
        totals.insert(key.clone(), total);
        trends.insert(key, UsageTrend(values));
    }
    Ok(TrendTable { labels, totals, trends })
}

/// `ngram,topic_id,similarity`, n-gram major, topics in framework order.
pub fn write_similarity(w: impl Write, matrices: &[SimilarityMatrix], topic_ids: &[&str]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["ngram", "topic_id", "similarity"]).map_err(csv_err)?;
    for m in matrices {
        let ngram = m.ngram.to_string();
        for (id, v) in topic_ids.iter().zip(&m.values) {
            wtr.write_record([ngram.as_str(), id, &fmt_f64(*v)]).map_err(csv_err)?;
        }
    }
    wtr.flush().map_err(|e| Error::Consistency(e.to_string()))
}

/// Reads `similarity.csv`; every n-gram must list every topic in `topic_ids`.
pub fn read_similarity(r: impl Read, topic_ids: &[&str]) -> Result<Vec<SimilarityMatrix>> {
    let index: BTreeMap<&str, usize> = topic_ids.iter().enumerate().map(|(i, id)| (*id, i)).collect();
    let mut rows: BTreeMap<NgramKey, Vec<Option<f64>>> = BTreeMap::new();
    let mut rdr = csv::Reader::from_reader(r);
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let j = *index
            .get(&rec[1])
            .ok_or_else(|| Error::Parse { line, message: format!("unknown topic `{}`", &rec[1]) })?;
        let v = parse_f64(&rec[2], line)?;
        rows.entry(NgramKey::parse(&rec[0])).or_insert_with(|| vec![None; topic_ids.len()])[j] = Some(v);
    }
    rows.into_iter()
        .map(|(ngram, vals)| {
            let values = vals
                .into_iter()
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::Config(format!("similarity.csv: `{ngram}` lacks some topics")))?;
            Ok(SimilarityMatrix { ngram, values })
        })
        .collect()
}

#[derive(Serialize, Deserialize)]
struct MemberJson {
    ngram: String,
    similarity: f64,
    rsd: f64,
}

#[derive(Serialize, Deserialize)]
struct AssociationJson {
    sim_threshold: f64,
    rsd_threshold: f64,
    members: Vec<MemberJson>,
}

/// `{"<topic_id>": {"sim_threshold", "rsd_threshold", "members": [...]}}` in topic order.
pub fn associations_json(assocs: &[TopicAssociation]) -> String {
    let mut map = Map::new();
    for a in assocs {
        let body = AssociationJson {
            sim_threshold: a.sim_threshold,
            rsd_threshold: a.rsd_threshold,
            members: a
                .members
                .iter()
                .map(|m| MemberJson { ngram: m.ngram.to_string(), similarity: m.similarity, rsd: m.rsd })
                .collect(),
        };
        map.insert(a.topic_id.clone(), serde_json::to_value(body).expect("finite values"));
    }
    serde_json::to_string_pretty(&Value::Object(map)).expect("serializable") + "\n"
}

pub fn parse_associations(s: &str) -> Result<Vec<TopicAssociation>> {
    let map: Map<String, Value> =
        serde_json::from_str(s).map_err(|e| Error::Config(format!("associations.json: {e}")))?;
    map.into_iter()
        .map(|(topic_id, v)| {
            let a: AssociationJson = serde_json::from_value(v)
                .map_err(|e| Error::Config(format!("associations.json `{topic_id}`: {e}")))?;
            Ok(TopicAssociation {
                topic_id,
                sim_threshold: a.sim_threshold,
                rsd_threshold: a.rsd_threshold,
                members: a
                    .members
                    .into_iter()
                    .map(|m| Member {
                        ngram: NgramKey::parse(&m.ngram),
                        similarity: m.similarity,
                        rsd: m.rsd,
                    })
                    .collect(),
            })
        })
        .collect()
}

/// `topic_id,<bin labels...>`.
pub fn write_topic_trends(w: impl Write, trends: &[TopicTrend], labels: &[String]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec!["topic_id".to_string()];
    header.extend(labels.iter().cloned());
    wtr.write_record(&header).map_err(csv_err)?;
    for t in trends {
        let mut row = vec![t.topic_id.clone()];
        row.extend(t.values.iter().map(|&v| fmt_f64(v)));
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Consistency(e.to_string()))
}

/// Returns bin labels and trends. The `empty` flag is not stored and reads as false.
pub fn read_topic_trends(r: impl Read) -> Result<(Vec<String>, Vec<TopicTrend>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.is_empty() || &header[0] != "topic_id" {
        return Err(Error::Parse { line: 1, message: "expected header `topic_id,...`".into() });
    }
    let labels = header.iter().skip(1).map(String::from).collect();
    let mut trends = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let values = rec.iter().skip(1).map(|s| parse_f64(s, i + 2)).collect::<Result<_>>()?;
        trends.push(TopicTrend { topic_id: rec[0].to_string(), values, empty: false });
    }
    Ok((labels, trends))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub bin: String,
    pub rows: Vec<String>,
    pub columns: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl MatrixFile {
    /// Grid frameworks keep their rows and columns. Flat frameworks become
    /// one row per topic under a single `value` column.
    pub fn new(framework: &TopicFramework, matrix: &SalienceMatrix, label: &str) -> Self {
        match framework.grid() {
            Some(g) => MatrixFile {
                bin: label.to_string(),
                rows: g.rows.clone(),
                columns: g.columns.clone(),
                values: g.arrange(&matrix.values),
            },
            None => MatrixFile {
                bin: label.to_string(),
                rows: framework.topic_ids().into_iter().map(String::from).collect(),
                columns: vec!["value".into()],
                values: matrix.values.iter().map(|&v| vec![v]).collect(),
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("finite values") + "\n"
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(format!("matrix file: {e}")))
    }
}
