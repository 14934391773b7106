use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::tokenize::words;

/// Non-negative sparse vector; indices strictly increasing, no stored zeros.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn zero() -> Self {
        SparseVector::default()
    }

    /// Builds from arbitrary `(index, weight)` pairs; duplicate indices are summed.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut entries: Vec<(u32, f64)> = pairs.into_iter().collect();
        entries.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
        for (i, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1 += w,
                _ => merged.push((i, w)),
            }
        }
        merged.retain(|&(_, w)| w != 0.0);
        SparseVector { entries: merged }
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries.binary_search_by_key(&index, |&(i, _)| i).map_or(0.0, |pos| self.entries[pos].1)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        let mut sum = 0.0;
        while let (Some(&&(i, x)), Some(&&(j, y))) = (a.peek(), b.peek()) {
            match i.cmp(&j) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => {
                    sum += x * y;
                    a.next();
                    b.next();
                }
            }
        }
        sum
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector::from_pairs(self.entries.iter().map(|&(i, w)| (i, w * factor)))
    }
}

/// Cosine similarity, defined as 0 when either vector is zero.
pub fn cosine(u: &SparseVector, v: &SparseVector) -> f64 {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return 0.0;
    }
    (u.dot(v) / (nu * nv)).clamp(0.0, 1.0)
}

/// Lowercased unigram vocabulary with `idf = ln(N / df)` over a document set.
#[derive(Debug, Clone)]
pub struct VectorSpace {
    vocabulary: Vec<String>,
    index: HashMap<String, u32>,
    idf: Vec<f64>,
    doc_count: usize,
}

impl VectorSpace {
    pub fn from_documents<S: AsRef<str>>(docs: &[S]) -> Result<Self> {
        if docs.len() < 2 {
            return Err(Error::Framework(
                "at least two topic documents are required; with one, every idf is 0 and similarity is meaningless"
                    .into(),
            ));
        }
        let doc_terms: Vec<BTreeSet<String>> =
            docs.iter().map(|d| words(d.as_ref()).map(str::to_lowercase).collect()).collect();
        let vocab: BTreeSet<&String> = doc_terms.iter().flatten().collect();
        let vocabulary: Vec<String> = vocab.into_iter().cloned().collect();
        let index: HashMap<String, u32> =
            vocabulary.iter().enumerate().map(|(i, t)| (t.clone(), i as u32)).collect();
        let mut df = vec![0usize; vocabulary.len()];
        for terms in &doc_terms {
            for t in terms {
                df[index[t] as usize] += 1;
            }
        }
        let n = docs.len() as f64;
        let idf = df.iter().map(|&d| (n / d as f64).ln()).collect();
        Ok(VectorSpace { vocabulary, index, idf, doc_count: docs.len() })
    }

    /// A space with given per-term idf weights.
    pub fn from_idf(weights: impl IntoIterator<Item = (String, f64)>, doc_count: usize) -> Self {
        let mut weights: Vec<(String, f64)> = weights.into_iter().collect();
        weights.sort_by(|a, b| a.0.cmp(&b.0));
        weights.dedup_by(|a, b| a.0 == b.0);
        let index = weights.iter().enumerate().map(|(i, (t, _))| (t.clone(), i as u32)).collect();
        let (vocabulary, idf) = weights.into_iter().unzip();
        VectorSpace { vocabulary, index, idf, doc_count }
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn term_index(&self, term: &str) -> Option<u32> {
        self.index.get(term).copied()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.term_index(term).map(|i| self.idf[i as usize])
    }

    /// Raw term frequency times idf; out-of-vocabulary terms are dropped.
    pub fn vectorize(&self, text: &str) -> SparseVector {
        let mut tf: HashMap<u32, u32> = HashMap::new();
        for w in words(text) {
            let lower = w.to_lowercase();
            if let Some(&i) = self.index.get(&lower) {
                *tf.entry(i).or_default() += 1;
            }
        }
        SparseVector::from_pairs(tf.into_iter().map(|(i, c)| (i, f64::from(c) * self.idf[i as usize])))
    }
}

pub fn context_vector(space: &VectorSpace, context: &str) -> SparseVector {
    space.vectorize(context)
}

/// Component-wise mean of the raw context vectors.
pub fn ngram_vector<S: AsRef<str>>(space: &VectorSpace, contexts: &[S]) -> Result<SparseVector> {
    if contexts.is_empty() {
        return Err(Error::Consistency("n-gram has no contexts".into()));
    }
    Ok(mean_vector(contexts.iter().map(|c| space.vectorize(c.as_ref())), contexts.len()))
}

pub(crate) fn mean_vector(vectors: impl Iterator<Item = SparseVector>, count: usize) -> SparseVector {
    let mut sum: HashMap<u32, f64> = HashMap::new();
    for v in vectors {
        for &(i, w) in v.entries() {
            *sum.entry(i).or_default() += w;
        }
    }
    let n = count as f64;
    SparseVector::from_pairs(sum.into_iter().map(|(i, w)| (i, w / n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(pairs: &[(u32, f64)]) -> SparseVector {
        SparseVector::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn cosine_identity() {
        let u = sv(&[(0, 1.5), (3, 2.0)]);
        assert!((cosine(&u, &u) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_disjoint() {
        assert_eq!(cosine(&sv(&[(0, 1.0)]), &sv(&[(1, 1.0)])), 0.0);
    }

    #[test]
    fn cosine_half_overlap() {
        let c = cosine(&sv(&[(0, 1.0), (1, 1.0)]), &sv(&[(0, 1.0)]));
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn cosine_zero_vector() {
        assert_eq!(cosine(&SparseVector::zero(), &sv(&[(0, 1.0)])), 0.0);
        assert_eq!(cosine(&SparseVector::zero(), &SparseVector::zero()), 0.0);
    }

    #[test]
    fn from_pairs_merges_and_drops_zeros() {
        let v = sv(&[(2, 1.0), (0, 0.0), (2, 1.0), (1, 3.0)]);
        assert_eq!(v.entries(), &[(1, 3.0), (2, 2.0)]);
        assert_eq!(v.get(2), 2.0);
        assert_eq!(v.get(0), 0.0);
    }

    #[test]
    fn idf_of_unique_term() {
        let mut docs: Vec<String> = (0..36).map(|i| format!("common word{i}")).collect();
        docs[0].push_str(" rare");
        let space = VectorSpace::from_documents(&docs).unwrap();
        assert!((space.idf("rare").unwrap() - 36f64.ln()).abs() < 1e-12);
        assert!((space.idf("rare").unwrap() - 3.5835).abs() < 5e-5);
        assert_eq!(space.idf("common").unwrap(), 0.0);
        assert!(space.vectorize("common common").is_zero());
    }

    #[test]
    fn single_document_rejected() {
        assert!(VectorSpace::from_documents(&["only one"]).is_err());
    }

    #[test]
    fn tf_times_idf() {
        // df(vote) = 3 of 8 docs and df(poll) = 1 of 8 give idf values; check tf scaling.
        let docs = ["vote vote poll", "vote", "vote", "x", "x", "x", "x", "x"];
        let space = VectorSpace::from_documents(&docs).unwrap();
        let v = space.vectorize(docs[0]);
        let vote = space.term_index("vote").unwrap();
        let poll = space.term_index("poll").unwrap();
        assert!((v.get(vote) - 2.0 * (8.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((v.get(poll) - 8f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn given_idf_weights() {
        let space = VectorSpace::from_idf([("vote".to_string(), 1.0), ("poll".to_string(), 2.0)], 4);
        let v = space.vectorize("vote vote poll");
        assert_eq!(v.get(space.term_index("vote").unwrap()), 2.0);
        assert_eq!(v.get(space.term_index("poll").unwrap()), 2.0);
        let p = context_vector(&space, "poll poll");
        assert_eq!(p.entries(), &[(space.term_index("poll").unwrap(), 4.0)]);
    }

    #[test]
    fn context_vector_is_case_insensitive_and_drops_oov() {
        let space = VectorSpace::from_documents(&["Poll a", "b"]).unwrap();
        let v = context_vector(&space, "POLL poll unknown");
        let poll = space.term_index("poll").unwrap();
        assert_eq!(v.nnz(), 1);
        assert!((v.get(poll) - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(context_vector(&space, "nothing here").is_zero());
    }

    #[test]
    fn mean_of_contexts() {
        let m = mean_vector([sv(&[(0, 2.0)]), sv(&[(1, 4.0)])].into_iter(), 2);
        assert_eq!(m.entries(), &[(0, 1.0), (1, 2.0)]);
    }

    #[test]
    fn ngram_vector_requires_contexts() {
        let space = VectorSpace::from_documents(&["a", "b"]).unwrap();
        assert!(ngram_vector::<&str>(&space, &[]).is_err());
        assert!(ngram_vector(&space, &["zzz", "yyy"]).unwrap().is_zero());
        let one = ngram_vector(&space, &["a a"]).unwrap();
        assert_eq!(one, space.vectorize("a a"));
    }
}
