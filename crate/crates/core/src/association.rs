//! Usage variability and bivariate n-gram/topic association.
//!
//! An n-gram is associated with a topic when both its similarity to the
//! topic and the relative standard deviation of its usage trend strictly
//! exceed the chosen percentile of their distributions. Geometrically the
//! members are the upper-right quadrant of the (rsd, similarity) scatter.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ngram::{NgramKey, UsageTrend};
use crate::topic_space::SimilarityMatrix;

/// Population standard deviation over mean.
pub fn relative_std_dev(trend: &[f64]) -> Result<f64> {
    if trend.is_empty() {
        return Err(Error::Consistency("empty usage trend".into()));
    }
    let m = trend.len() as f64;
    let mean = trend.iter().sum::<f64>() / m;
    if mean <= 0.0 {
        return Err(Error::Consistency(
            "usage trend has zero mean; n-grams in the table always occur at least once".into(),
        ));
    }
    let var = trend.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m;
    Ok(var.sqrt() / mean)
}

/// Linear interpolation between closest ranks: `rank = p/100 * (N - 1)`.
pub fn percentile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Consistency("percentile of an empty list".into()));
    }
    if !(0.0..=100.0).contains(&p) {
        return Err(Error::Config(format!("percentile {p} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    let frac = rank - lo as f64;
    if lo == hi {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub ngram: NgramKey,
    pub similarity: f64,
    pub rsd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicAssociation {
    pub topic_id: String,
    /// Sorted by descending similarity, then n-gram.
    pub members: Vec<Member>,
    pub sim_threshold: f64,
    pub rsd_threshold: f64,
}

impl TopicAssociation {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Which similarity distribution the percentile threshold is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimilarityScope {
    /// Each topic's own similarity column.
    #[default]
    PerTopic,
    /// All similarity values across every topic.
    Global,
}

impl fmt::Display for SimilarityScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimilarityScope::PerTopic => "per-topic",
            SimilarityScope::Global => "global",
        })
    }
}

impl FromStr for SimilarityScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per-topic" => Ok(SimilarityScope::PerTopic),
            "global" => Ok(SimilarityScope::Global),
            other => Err(Error::Config(format!("unknown similarity scope `{other}`"))),
        }
    }
}

pub fn associate(
    topic_id: &str,
    similarities: &BTreeMap<NgramKey, f64>,
    variabilities: &BTreeMap<NgramKey, f64>,
    p: f64,
) -> Result<TopicAssociation> {
    check_same_keys(similarities, variabilities)?;
    if similarities.is_empty() {
        return Ok(TopicAssociation {
            topic_id: topic_id.to_string(),
            members: Vec::new(),
            sim_threshold: 0.0,
            rsd_threshold: 0.0,
        });
    }
    let sims: Vec<f64> = similarities.values().copied().collect();
    let rsds: Vec<f64> = variabilities.values().copied().collect();
    associate_with_thresholds(
        topic_id,
        similarities,
        variabilities,
        percentile(&sims, p)?,
        percentile(&rsds, p)?,
    )
}

fn check_same_keys(a: &BTreeMap<NgramKey, f64>, b: &BTreeMap<NgramKey, f64>) -> Result<()> {
    if a.len() != b.len() || a.keys().zip(b.keys()).any(|(x, y)| x != y) {
        let missing =
            a.keys().find(|k| !b.contains_key(*k)).or_else(|| b.keys().find(|k| !a.contains_key(*k)));
        return Err(Error::Consistency(format!(
            "similarity and variability cover different n-grams (e.g. `{}`)",
            missing.map(ToString::to_string).unwrap_or_default()
        )));
    }
    Ok(())
}

/// Members strictly above both thresholds.
pub fn associate_with_thresholds(
    topic_id: &str,
    similarities: &BTreeMap<NgramKey, f64>,
    variabilities: &BTreeMap<NgramKey, f64>,
    sim_threshold: f64,
    rsd_threshold: f64,
) -> Result<TopicAssociation> {
    check_same_keys(similarities, variabilities)?;
    let mut members: Vec<Member> = similarities
        .iter()
        .zip(variabilities.values())
        .filter(|((_, &s), &r)| s > sim_threshold && r > rsd_threshold)
        .map(|((k, &s), &r)| Member { ngram: k.clone(), similarity: s, rsd: r })
        .collect();
    members.sort_by(|a, b| b.similarity.total_cmp(&a.similarity).then_with(|| a.ngram.cmp(&b.ngram)));
    Ok(TopicAssociation { topic_id: topic_id.to_string(), members, sim_threshold, rsd_threshold })
}

pub fn variabilities(trends: &BTreeMap<NgramKey, UsageTrend>) -> Result<BTreeMap<NgramKey, f64>> {
    trends
        .iter()
        .map(|(k, t)| {
            relative_std_dev(t.values()).map(|r| (k.clone(), r)).map_err(|e| match e {
                Error::Consistency(m) => Error::Consistency(format!("`{k}`: {m}")),
                e => e,
            })
        })
        .collect()
}

/// Associates n-grams with every topic.
///
/// `similarity` holds one matrix per n-gram whose values follow `topic_ids`.
pub fn associate_all(
    topic_ids: &[&str],
    similarity: &[SimilarityMatrix],
    variabilities: &BTreeMap<NgramKey, f64>,
    p: f64,
    scope: SimilarityScope,
) -> Result<Vec<TopicAssociation>> {
    if let Some(bad) = similarity.iter().find(|m| m.values.len() != topic_ids.len()) {
        return Err(Error::Consistency(format!(
            "`{}` has {} similarity values for {} topics",
            bad.ngram,
            bad.values.len(),
            topic_ids.len()
        )));
    }
    let column = |j: usize| -> BTreeMap<NgramKey, f64> {
        similarity.iter().map(|m| (m.ngram.clone(), m.values[j])).collect()
    };
    let rsds: Vec<f64> = variabilities.values().copied().collect();
    if rsds.is_empty() {
        return topic_ids
            .iter()
            .enumerate()
            .map(|(j, id)| associate(id, &column(j), variabilities, p))
            .collect();
    }
    let rsd_threshold = percentile(&rsds, p)?;
    let global_sim = match scope {
        SimilarityScope::Global => {
            let all: Vec<f64> = similarity.iter().flat_map(|m| m.values.iter().copied()).collect();
            Some(percentile(&all, p)?)
        }
        SimilarityScope::PerTopic => None,
    };
    topic_ids
        .iter()
        .enumerate()
        .map(|(j, id)| {
            let sims = column(j);
            let sim_threshold = match global_sim {
                Some(t) => t,
                None => percentile(&sims.values().copied().collect::<Vec<_>>(), p)?,
            };
            associate_with_thresholds(id, &sims, variabilities, sim_threshold, rsd_threshold)
        })
        .collect()
}
