//! Quantify how predefined topics rise and fall in salience across a
//! time-stamped text corpus.
//!
//! The pipeline runs in four steps:
//!
//! 1. [`corpus`] loads dated documents and partitions them into time bins.
//! 2. [`ngram`] counts n-gram instances per bin and derives each n-gram's
//!    relative usage trend, keeping every instance's enclosing sentence as
//!    a context.
//! 3. [`topic_space`] builds a TF-IDF space from a topic framework's
//!    ground-truth material and scores each n-gram against every topic
//!    by averaging its context vectors; [`association`] links n-grams to
//!    topics when both similarity and usage variability are in the upper
//!    percentile.
//! 4. [`salience`] turns associated usage trends into per-topic salience
//!    trends (mean time derivative) and per-bin salience matrices.
//!
//! [`pipeline`] runs all of it end to end and [`export`] writes CSV, JSON
//! and SVG artifacts. [`synth`] generates corpora with planted topical
//! bursts and an independent brute-force counter for testing.

pub mod association;
pub mod corpus;
pub mod data;
pub mod error;
pub mod export;
pub mod ngram;
pub mod pipeline;
pub mod salience;
pub mod synth;
pub mod tokenize;
pub mod topic_space;

pub use error::{Error, Result};
