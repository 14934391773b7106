//! Generate a corpus, run the whole analysis into an output directory, and
//! list what was written.
//!
//! ```text
//! cargo run --example full_pipeline -- /tmp/salience-run
//! ```

use std::path::PathBuf;

use salience::data::{LEXICON_JSON, PMESII_ASCOPE_JSON};
use salience::pipeline::{run_analyze, run_render, RenderRequest, RunConfig};
use salience::synth::{generate_corpus, PlantedEvent, SynthSpec};

fn main() -> salience::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("salience-run"));
    std::fs::create_dir_all(&root).map_err(|e| salience::Error::Config(e.to_string()))?;

    let mut spec = SynthSpec::new(7, 12, 20);
    spec.events = vec![
        PlantedEvent {
            topic_id: "political_events".into(),
            phrases: vec!["repeat election".into()],
            start_bin: 7,
            duration: 2,
            intensity: 0.2,
        },
        PlantedEvent {
            topic_id: "social_capabilities".into(),
            phrases: vec!["education system".into(), "health care".into()],
            start_bin: 3,
            duration: 3,
            intensity: 0.2,
        },
    ];
    let corpus_path = root.join("corpus.jsonl");
    generate_corpus(&spec)?.write(&corpus_path)?;
    let framework_path = root.join("pmesii_ascope.json");
    let lexicon_path = root.join("lexicon.json");
    for (path, body) in [(&framework_path, PMESII_ASCOPE_JSON), (&lexicon_path, LEXICON_JSON)] {
        std::fs::write(path, body).map_err(|e| salience::Error::Config(e.to_string()))?;
    }

    let mut config = RunConfig::new(&corpus_path, &framework_path, root.join("out"));
    config.lexicon = Some(lexicon_path);
    config.params.min_total = 3;
    let summary = run_analyze(&config)?;
    for path in &summary.artifacts {
        println!("{}", summary.out.join(path).display());
    }
    println!("{} topics without associated n-grams", summary.empty_topics.len());

    let request = RenderRequest {
        topics: vec!["political_events".into(), "social_capabilities".into()],
        ngrams: vec!["repeat election".into(), "education system".into()],
        matrices: false,
    };
    for path in run_render(&summary.out, &request)? {
        println!("{}", summary.out.join(path).display());
    }
    Ok(())
}
