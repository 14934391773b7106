//! Score n-grams against the PMESII-ASCOPE topics and print each as a 6x6
//! similarity grid.
//!
//! ```text
//! cargo run --example topic_similarity
//! ```

use salience::data::{example_lexicon, pmesii_ascope};
use salience::ngram::NgramKey;
use salience::topic_space::TopicSpace;

fn print_grid(title: &str, rows: &[String], columns: &[String], grid: &[Vec<f64>]) {
    println!("{title}");
    print!("{:>16}", "");
    for c in columns {
        print!("{:>14}", c);
    }
    println!();
    for (r, row) in rows.iter().zip(grid) {
        print!("{r:>16}");
        for v in row {
            print!("{v:>14.4}");
        }
        println!();
    }
    println!();
}

fn main() -> salience::Result<()> {
    let lexicon = example_lexicon();
    let space = TopicSpace::build(pmesii_ascope(), Some(&lexicon))?;
    let framework = space.framework();
    let grid = framework.grid().expect("PMESII-ASCOPE is a grid");

    let cases: [(&str, &[&str]); 3] = [
        (
            "repeat election",
            &[
                "The court ordered a repeat election after the presidential vote was annulled.",
                "Voters returned to the polls for the repeat election in October.",
            ],
        ),
        ("education system", &["Teachers warned that the education system lacks schools and textbooks."]),
        ("public hospitals", &["Doctors at public hospitals went on strike over pay and clinic conditions."]),
    ];
    for (ngram, contexts) in cases {
        let m = space.similarity_matrix(NgramKey::parse(ngram), contexts)?;
        let best = (0..m.values.len()).fold(0, |b, i| if m.values[i] > m.values[b] { i } else { b });
        let title = format!("`{ngram}` (closest topic: {})", framework.topics[best].id);
        print_grid(&title, &grid.rows, &grid.columns, &m.grid(framework).unwrap());
    }
    Ok(())
}
