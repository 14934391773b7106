//! Topic frameworks, their TF-IDF vector space, and n-gram/topic similarity.

mod framework;
mod similarity;
mod vector;

pub use framework::{
    expand_text, expand_topic_document, load_framework, load_lexicon, parse_lexicon, GridLayout, Lexicon,
    Topic, TopicFramework,
};
pub use similarity::{similarity_table, SimilarityMatrix, TopicSpace};
pub use vector::{context_vector, cosine, ngram_vector, SparseVector, VectorSpace};

/// Builds the vector space over the expanded topic documents and returns
/// each topic's vector in framework order.
pub fn build_vector_space(
    framework: &TopicFramework,
    lexicon: Option<&Lexicon>,
) -> crate::Result<(VectorSpace, Vec<SparseVector>)> {
    let docs: Vec<String> = framework.topics.iter().map(|t| expand_topic_document(t, lexicon)).collect();
    let space = VectorSpace::from_documents(&docs)?;
    let vectors = docs.iter().map(|d| space.vectorize(d)).collect();
    Ok((space, vectors))
}
