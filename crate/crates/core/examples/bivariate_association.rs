//! Link n-grams to a topic when both their similarity and their usage
//! variability exceed the 75th percentile, and show the quadrant split.
//!
//! ```text
//! cargo run --example bivariate_association
//! ```

use std::collections::BTreeMap;

use salience::association::{associate, percentile};
use salience::ngram::NgramKey;

fn main() -> salience::Result<()> {
    // (n-gram, similarity to "political events", relative standard deviation)
    let population = [
        ("repeat election", 0.0753, 2.9),
        ("polls were", 0.0512, 1.7),
        ("presidential petition", 0.0610, 2.4),
        ("supreme court", 0.0405, 2.2),
        ("the government", 0.0300, 0.4),
        ("said that", 0.0021, 0.2),
        ("in the", 0.0010, 0.1),
        ("road from", 0.0004, 1.9),
        ("education system", 0.0150, 0.9),
        ("public hospitals", 0.0080, 1.1),
        ("voter turnout", 0.0702, 0.6),
        ("of the", 0.0008, 0.1),
    ];
    let sims: BTreeMap<NgramKey, f64> = population.iter().map(|(g, s, _)| (NgramKey::parse(g), *s)).collect();
    let rsds: BTreeMap<NgramKey, f64> = population.iter().map(|(g, _, r)| (NgramKey::parse(g), *r)).collect();

    let a = associate("political_events", &sims, &rsds, 75.0)?;
    println!("similarity threshold {:.4}, rsd threshold {:.4}", a.sim_threshold, a.rsd_threshold);
    for m in &a.members {
        println!("  member  {:<22} sim {:.4}  rsd {:.2}", m.ngram.to_string(), m.similarity, m.rsd);
    }

    println!("\nquadrants:");
    for (g, s, r) in population {
        let quadrant = match (s > a.sim_threshold, r > a.rsd_threshold) {
            (true, true) => "associated",
            (true, false) => "on topic, steady",
            (false, true) => "variable, off topic",
            (false, false) => "neither",
        };
        println!("  {g:<22} {quadrant}");
    }

    let strict = associate("political_events", &sims, &rsds, 90.0)?;
    let all_sims: Vec<f64> = sims.values().copied().collect();
    println!(
        "\nat p=90 the similarity threshold rises to {:.4} and {} of {} members remain",
        percentile(&all_sims, 90.0)?,
        strict.members.len(),
        a.members.len()
    );
    Ok(())
}
