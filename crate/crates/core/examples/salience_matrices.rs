//! Turn associated usage trends into topic salience trends, build the
//! per-month salience matrix, and normalize each month across topics.
//!
//! ```text
//! cargo run --example salience_matrices
//! ```

use chrono::NaiveDate;
use salience::corpus::Document;
use salience::pipeline::{analyze, AnalysisParams};
use salience::salience::salience_matrix;
use salience::topic_space::TopicFramework;

fn main() -> salience::Result<()> {
    let framework = TopicFramework::from_json(
        r#"{"name": "two by two", "rows": ["Political", "Infrastructure"], "columns": ["Areas", "Events"],
            "topics": [
              {"id": "political_areas", "row": "Political", "column": "Areas",
               "definition": "Constituencies, counties and electoral boundaries."},
              {"id": "political_events", "row": "Political", "column": "Events",
               "definition": "Elections, repeat elections, votes and petitions.",
               "keywords": ["repeat election", "petition"]},
              {"id": "infrastructure_areas", "row": "Infrastructure", "column": "Areas",
               "definition": "Road corridors and project sites.", "keywords": ["road corridor"]},
              {"id": "infrastructure_events", "row": "Infrastructure", "column": "Events",
               "definition": "Bridge openings, road closures and construction launches."}
            ]}"#,
    )?;

    let month = |m: u32| NaiveDate::from_ymd_opt(2017, m, 10).unwrap();
    let mut docs = Vec::new();
    for m in 1..=6u32 {
        for k in 0..4 {
            let mut text = String::from("Officials met in the capital. Traders opened early in the market. ");
            // The election story grows over months 4 to 6.
            if m >= 4 && k < m - 2 {
                text.push_str("A repeat election petition was filed. The repeat election date was set. ");
            }
            if m == 2 || m == 3 {
                text.push_str("Work on the road corridor resumed. Trucks crowded the road corridor. ");
            }
            docs.push(Document::new(format!("{m}-{k}"), month(m), text));
        }
    }

    // A toy corpus has few n-grams, so a low percentile lets both stories qualify.
    let params = AnalysisParams { min_total: 2, percentile: 30.0, ..AnalysisParams::default() };
    let a = analyze(docs, framework, None, params)?;
    let labels = a.bin_labels();

    for (raw, norm) in a.salience.iter().zip(&a.normalized) {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:>8.4}")).collect::<String>();
        println!("{:<22}{}{}", raw.topic_id, fmt(&raw.values), if raw.empty { "  (no n-grams)" } else { "" });
        println!("{:<22}{}", "  normalized", fmt(&norm.values));
    }

    for t in [1, 3] {
        let m = salience_matrix(&a.framework, &a.salience, t)?;
        println!("\nsalience matrix {}:", labels[t]);
        for row in m.grid(&a.framework).unwrap() {
            println!("  {:?}", row);
        }
    }
    Ok(())
}
