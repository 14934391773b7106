//! Artifact writers and readers.
//!
//! Numbers are written in their shortest round-trip decimal form, so every
//! value read back from a CSV or JSON artifact equals the in-memory value.

mod svg;
mod tables;

pub use svg::{escape, render_heatmap, render_matrix_svg, render_trend_svg, Series};
pub use tables::{
    associations_json, fmt_f64, parse_associations, read_ngram_trends, read_similarity, read_topic_trends,
    write_ngram_trends, write_similarity, write_topic_trends, MatrixFile, TrendTable,
};
