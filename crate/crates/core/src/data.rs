//! Bundled example data.

use crate::topic_space::{parse_lexicon, Lexicon, TopicFramework};

pub const PMESII_ASCOPE_JSON: &str = include_str!("../data/pmesii_ascope.json");
pub const LEXICON_JSON: &str = include_str!("../data/lexicon.json");

/// The 6 x 6 PMESII-ASCOPE framework: Political, Military, Economic,
/// Social, Infrastructure and Information rows crossed with Areas,
/// Structures, Capabilities, Organizations, People and Events columns.
pub fn pmesii_ascope() -> TopicFramework {
    TopicFramework::from_json(PMESII_ASCOPE_JSON).expect("bundled framework is valid")
}

pub fn example_lexicon() -> Lexicon {
    parse_lexicon(LEXICON_JSON).expect("bundled lexicon is valid")
}
