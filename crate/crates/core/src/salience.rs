//! Topic usage and salience trends, per-bin salience matrices and
//! per-bin normalization.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::association::TopicAssociation;
use crate::error::{Error, Result};
use crate::ngram::{NgramKey, UsageTrend};
use crate::topic_space::TopicFramework;

/// Backward first difference with `d[0] = 0`.
pub fn time_derivative(values: &[f64]) -> Vec<f64> {
    let mut d = Vec::with_capacity(values.len());
    if let Some(&first) = values.first() {
        d.push(0.0);
        let mut prev = first;
        for &v in &values[1..] {
            d.push(v - prev);
            prev = v;
        }
    }
    d
}

/// A per-topic time series. `empty` marks topics with no associated n-grams,
/// whose values are all zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicTrend {
    pub topic_id: String,
    pub values: Vec<f64>,
    pub empty: bool,
}

pub type TopicUsageTrend = TopicTrend;
pub type SalienceTrend = TopicTrend;

fn member_trends<'a>(
    association: &TopicAssociation,
    trends: &'a BTreeMap<NgramKey, UsageTrend>,
    bin_count: usize,
) -> Result<Vec<&'a [f64]>> {
    association
        .members
        .iter()
        .map(|m| {
            let t = trends.get(&m.ngram).ok_or_else(|| {
                Error::Consistency(format!(
                    "no usage trend for `{}` (topic `{}`)",
                    m.ngram, association.topic_id
                ))
            })?;
            if t.len() != bin_count {
                return Err(Error::Consistency(format!(
                    "usage trend for `{}` has {} bins, expected {bin_count}",
                    m.ngram,
                    t.len()
                )));
            }
            Ok(t.values())
        })
        .collect()
}

/// Sum of member usage trends.
pub fn topic_usage_trend(
    association: &TopicAssociation,
    trends: &BTreeMap<NgramKey, UsageTrend>,
    bin_count: usize,
) -> Result<TopicUsageTrend> {
    let members = member_trends(association, trends, bin_count)?;
    let mut values = vec![0.0; bin_count];
    for t in &members {
        for (acc, v) in values.iter_mut().zip(t.iter()) {
            *acc += v;
        }
    }
    Ok(TopicTrend { topic_id: association.topic_id.clone(), values, empty: members.is_empty() })
}

/// Mean of member usage derivatives.
pub fn topic_salience_trend(
    association: &TopicAssociation,
    trends: &BTreeMap<NgramKey, UsageTrend>,
    bin_count: usize,
) -> Result<SalienceTrend> {
    let members = member_trends(association, trends, bin_count)?;
    let mut values = vec![0.0; bin_count];
    for t in &members {
        for (acc, d) in values.iter_mut().zip(time_derivative(t)) {
            *acc += d;
        }
    }
    if !members.is_empty() {
        let n = members.len() as f64;
        values.iter_mut().for_each(|v| *v /= n);
    }
    Ok(TopicTrend { topic_id: association.topic_id.clone(), values, empty: members.is_empty() })
}

/// Every topic's salience at one bin, in framework order.
#[derive(Debug, Clone, PartialEq)]
pub struct SalienceMatrix {
    pub bin: usize,
    pub values: Vec<f64>,
}

impl SalienceMatrix {
    pub fn grid(&self, framework: &TopicFramework) -> Option<Vec<Vec<f64>>> {
        framework.grid().map(|g| g.arrange(&self.values))
    }
}

/// `trends` must follow framework topic order.
pub fn salience_matrix(
    framework: &TopicFramework,
    trends: &[SalienceTrend],
    t: usize,
) -> Result<SalienceMatrix> {
    if trends.len() != framework.len() {
        return Err(Error::Consistency(format!(
            "{} salience trends for {} topics",
            trends.len(),
            framework.len()
        )));
    }
    let values =
        framework
            .topics
            .iter()
            .zip(trends)
            .map(|(topic, trend)| {
                if topic.id != trend.topic_id {
                    return Err(Error::Consistency(format!(
                        "salience trend `{}` out of framework order (expected `{}`)",
                        trend.topic_id, topic.id
                    )));
                }
                trend.values.get(t).copied().ok_or_else(|| {
                    Error::Config(format!("bin {t} out of range ({} bins)", trend.values.len()))
                })
            })
            .collect::<Result<_>>()?;
    Ok(SalienceMatrix { bin: t, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `(v - mean) / std` across topics, population std.
    #[default]
    ZScore,
    /// `(v - min) / (max - min)` across topics.
    MinMax,
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::ZScore => "zscore",
            Normalization::MinMax => "minmax",
        })
    }
}

impl FromStr for Normalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zscore" => Ok(Normalization::ZScore),
            "minmax" => Ok(Normalization::MinMax),
            other => Err(Error::Config(format!("unknown normalization `{other}`"))),
        }
    }
}

/// Normalizes each bin across topics. Bins where every topic has the same
/// value normalize to 0.
pub fn normalize_salience(trends: &[SalienceTrend], method: Normalization) -> Vec<SalienceTrend> {
    let mut out = trends.to_vec();
    let Some(m) = trends.iter().map(|t| t.values.len()).max() else {
        return out;
    };
    let k = trends.len() as f64;
    for t in 0..m {
        let column: Vec<f64> = trends.iter().map(|tr| tr.values[t]).collect();
        let (offset, scale) = match method {
            Normalization::ZScore => {
                let mean = column.iter().sum::<f64>() / k;
                let var = column.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / k;
                (mean, var.sqrt())
            }
            Normalization::MinMax => {
                let min = column.iter().copied().fold(f64::INFINITY, f64::min);
                let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (min, max - min)
            }
        };
        for (tr, v) in out.iter_mut().zip(&column) {
            tr.values[t] = if scale > 0.0 { (v - offset) / scale } else { 0.0 };
        }
    }
    out
}
