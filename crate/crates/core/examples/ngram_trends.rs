//! Count bigrams per month and print the relative usage trend of the most
//! variable ones.
//!
//! ```text
//! cargo run --example ngram_trends
//! ```

use chrono::NaiveDate;
use salience::association::variabilities;
use salience::corpus::{bin_documents, build_binning, Document, Granularity};
use salience::ngram::{build_ngram_table, contexts_of, NgramKey, TableOptions};

fn main() -> salience::Result<()> {
    let day = |m: u32, d: u32| NaiveDate::from_ymd_opt(2017, m, d).unwrap();
    let docs = vec![
        Document::new("a", day(6, 3), "The general election is set for August. Voters register early."),
        Document::new("b", day(7, 12), "Campaigns close before the general election. Voters register late."),
        Document::new("c", day(8, 9), "The general election was held. Results were annulled by the court.")
            .with_title("Court annuls general election"),
        Document::new(
            "d",
            day(9, 1),
            "A repeat election is ordered. The repeat election will be in October.",
        ),
        Document::new(
            "e",
            day(10, 26),
            "The repeat election was held. Turnout for the repeat election was low.",
        ),
    ];

    let binning = build_binning(&docs, Granularity::Month)?;
    let labels = binning.labels();
    let corpus = bin_documents(docs, binning)?;
    let options = TableOptions { min_total: 2, ..TableOptions::default() };
    let table = build_ngram_table(&corpus, options)?;

    println!("bins: {}", labels.join(" "));
    println!("bigram instances per bin: {:?}", table.bin_totals());
    let trends = table.trends();
    let mut ranked: Vec<_> = variabilities(&trends)?.into_iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    for (key, rsd) in ranked.iter().take(5) {
        let trend: Vec<String> = trends[key].values().iter().map(|v| format!("{v:.3}")).collect();
        println!("{key:<20} rsd {rsd:.3}  [{}]", trend.join(", "));
    }

    let record = table.get(&NgramKey::parse("repeat election")).expect("retained");
    println!("\ncontexts of `repeat election`:");
    for sentence in contexts_of(record) {
        println!("  {sentence}");
    }
    Ok(())
}
