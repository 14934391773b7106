use rayon::prelude::*;

use super::framework::{Lexicon, TopicFramework};
use super::vector::{cosine, mean_vector, SparseVector, VectorSpace};
use crate::error::{Error, Result};
use crate::ngram::{NgramKey, NgramTable};

/// Cosine similarity of one n-gram against every topic, in framework order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub ngram: NgramKey,
    pub values: Vec<f64>,
}

impl SimilarityMatrix {
    /// Row-major grid when the framework declares one.
    pub fn grid(&self, framework: &TopicFramework) -> Option<Vec<Vec<f64>>> {
        framework.grid().map(|g| g.arrange(&self.values))
    }
}

/// A framework together with its vector space and topic vectors.
#[derive(Debug, Clone)]
pub struct TopicSpace {
    framework: TopicFramework,
    space: VectorSpace,
    topic_vectors: Vec<SparseVector>,
}

impl TopicSpace {
    pub fn build(framework: TopicFramework, lexicon: Option<&Lexicon>) -> Result<Self> {
        let (space, topic_vectors) = super::build_vector_space(&framework, lexicon)?;
        Ok(TopicSpace { framework, space, topic_vectors })
    }

    pub fn framework(&self) -> &TopicFramework {
        &self.framework
    }

    pub fn space(&self) -> &VectorSpace {
        &self.space
    }

    pub fn topic_vectors(&self) -> &[SparseVector] {
        &self.topic_vectors
    }

    pub fn similarities(&self, v: &SparseVector) -> Vec<f64> {
        self.topic_vectors.iter().map(|t| cosine(v, t)).collect()
    }

    pub fn similarity_matrix<S: AsRef<str>>(
        &self,
        ngram: NgramKey,
        contexts: &[S],
    ) -> Result<SimilarityMatrix> {
        if contexts.is_empty() {
            return Err(Error::Consistency(format!("`{ngram}` has no contexts")));
        }
        let v = mean_vector(contexts.iter().map(|c| self.space.vectorize(c.as_ref())), contexts.len());
        Ok(SimilarityMatrix { values: self.similarities(&v), ngram })
    }
}

/// Similarity matrices for every n-gram of the table, in n-gram order.
pub fn similarity_table(table: &NgramTable, topics: &TopicSpace) -> Result<Vec<SimilarityMatrix>> {
    let records: Vec<_> = table.records().collect();
    records
        .par_iter()
        .map(|r| {
            let contexts: Vec<&str> = r.contexts.iter().map(|c| &*c.sentence).collect();
            topics.similarity_matrix(r.key.clone(), &contexts)
        })
        .collect()
}
