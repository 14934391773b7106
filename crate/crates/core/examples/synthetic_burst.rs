//! Plant a burst in a synthetic corpus, check the n-gram counts against the
//! brute-force oracle, and locate the burst in the planted topic's
//! salience trend.
//!
//! ```text
//! cargo run --example synthetic_burst
//! ```

use salience::data::pmesii_ascope;
use salience::ngram::NgramKey;
use salience::pipeline::{analyze, AnalysisParams};
use salience::synth::{generate_corpus, Oracle, PlantedEvent, SizeRange, SynthSpec};

fn main() -> salience::Result<()> {
    let mut spec = SynthSpec::new(42, 24, 10);
    spec.vocab_size = 60;
    spec.sentences_per_doc = SizeRange::new(10, 10);
    spec.sentence_length = SizeRange::new(8, 12);
    spec.events.push(PlantedEvent {
        topic_id: "political_events".into(),
        phrases: vec!["repeat election".into(), "general election".into()],
        start_bin: 15,
        duration: 2,
        intensity: 0.3,
    });
    let corpus = generate_corpus(&spec)?;
    println!("{} documents over {} months", corpus.documents.len(), corpus.binning.bin_count());

    let oracle = Oracle::from_jsonl(&corpus.to_jsonl(), &corpus.binning, true)?;
    for planted in &corpus.truth.phrases {
        let tokens: Vec<&str> = planted.phrase.split(' ').collect();
        assert_eq!(oracle.count(&tokens), planted.counts);
        println!("`{}` planted per bin: {:?}", planted.phrase, planted.counts);
    }

    let params = AnalysisParams { min_total: 3, ..AnalysisParams::default() };
    let framework = pmesii_ascope();
    let a = analyze(corpus.documents.clone(), framework.clone(), None, params)?;

    let counts = &a.table.get(&NgramKey::parse("repeat election")).expect("retained").counts;
    assert_eq!(counts, &oracle.count(&["repeat", "election"]));

    let j = framework.topic_index("political_events").unwrap();
    let trend = &a.salience[j].values;
    let peak = (0..trend.len()).fold(0, |b, t| if trend[t] > trend[b] { t } else { b });
    println!(
        "political_events: {} associated n-grams, salience peaks in {} (event starts {})",
        a.associations[j].members.len(),
        a.bin_labels()[peak],
        a.bin_labels()[15]
    );
    Ok(())
}
