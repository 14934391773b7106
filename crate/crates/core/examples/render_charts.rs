//! Render a line chart and a PMESII-ASCOPE heat grid as standalone SVG files.
//!
//! ```text
//! cargo run --example render_charts -- /tmp/charts
//! ```

use std::path::PathBuf;

use salience::data::pmesii_ascope;
use salience::export::{render_matrix_svg, render_trend_svg, Series};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("salience-charts"));
    std::fs::create_dir_all(&dir)?;

    let labels: Vec<String> = (1..=12).map(|m| format!("2017-{m:02}")).collect();
    let repeat: Vec<f64> =
        (0..12).map(|t| if (8..10).contains(&t) { 0.004 / (t as f64 - 7.0) } else { 0.0 }).collect();
    let general: Vec<f64> = (0..12).map(|t| 0.003 * (-((t as f64 - 7.0).powi(2)) / 4.0).exp()).collect();
    let chart = render_trend_svg(
        "Relative usage",
        "relative usage",
        &[Series::new("repeat election", repeat), Series::new("general election", general)],
        &labels,
    )?;
    let line_path = dir.join("usage.svg");
    std::fs::write(&line_path, chart)?;

    let framework = pmesii_ascope();
    let values: Vec<f64> = framework
        .topics
        .iter()
        .map(|t| {
            if t.id.starts_with("political") {
                0.8
            } else if t.id.ends_with("events") {
                0.4
            } else {
                0.05
            }
        })
        .collect();
    let grid = render_matrix_svg(&framework, &values, "Salience 2017-08")?;
    let grid_path = dir.join("matrix.svg");
    std::fs::write(&grid_path, grid)?;

    println!("{}\n{}", line_path.display(), grid_path.display());
    Ok(())
}
