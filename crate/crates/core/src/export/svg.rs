//! Self-contained SVG line charts and heat grids.
//!
//! Output uses only inline elements (no scripts, fonts or external
//! references) and fixed two-decimal coordinates, so identical inputs
//! render to identical bytes.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::topic_space::TopicFramework;

const PALETTE: &[&str] = &[
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22",
    "#17becf",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub name: String,
    pub values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Self {
        Series { name: name.into(), values }
    }
}

pub fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn tick_label(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Line chart with one polyline per series. A single bin renders markers only.
pub fn render_trend_svg(
    title: &str,
    y_label: &str,
    series: &[Series],
    bin_labels: &[String],
) -> Result<String> {
    let m = bin_labels.len();
    if m == 0 {
        return Err(Error::Config("trend chart needs at least one bin".into()));
    }
    if let Some(s) = series.iter().find(|s| s.values.len() != m) {
        return Err(Error::Config(format!("series `{}` has {} values for {m} bins", s.name, s.values.len())));
    }

    let (width, height) = (900.0, 460.0);
    let (left, right, top, bottom) = (80.0, 200.0, 50.0, 90.0);
    let plot_w = width - left - right;
    let plot_h = height - top - bottom;

    let mut lo = series.iter().flat_map(|s| s.values.iter().copied()).fold(f64::INFINITY, f64::min);
    let mut hi = series.iter().flat_map(|s| s.values.iter().copied()).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        lo = 0.0;
        hi = 1.0;
    }
    if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
        lo -= 0.5;
        hi += 0.5;
    }
    let x = |i: usize| {
        if m == 1 {
            left + plot_w / 2.0
        } else {
            left + plot_w * i as f64 / (m - 1) as f64
        }
    };
    let y = |v: f64| top + plot_h * (hi - v) / (hi - lo);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{width}" height="{height}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        left + plot_w / 2.0,
        escape(title)
    );

    // Axes and gridlines.
    let _ = writeln!(
        svg,
        r#"<path d="M{left:.2},{top:.2} V{:.2} H{:.2}" fill="none" stroke="black"/>"#,
        top + plot_h,
        left + plot_w
    );
    for k in 0..=4 {
        let v = lo + (hi - lo) * k as f64 / 4.0;
        let yy = y(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{left:.2}" y1="{yy:.2}" x2="{:.2}" y2="{yy:.2}" stroke="#dddddd"/>"##,
            left + plot_w
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 6.0,
            yy + 4.0,
            tick_label(v)
        );
    }
    let step = m.div_ceil(24).max(1);
    for i in (0..m).step_by(step) {
        let xx = x(i);
        let _ = writeln!(
            svg,
            r#"<text x="{xx:.2}" y="{:.2}" text-anchor="end" transform="rotate(-45 {xx:.2} {:.2})">{}</text>"#,
            top + plot_h + 16.0,
            top + plot_h + 16.0,
            escape(&bin_labels[i])
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">time bin</text>"#,
        left + plot_w / 2.0,
        height - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">{}</text>"#,
        top + plot_h / 2.0,
        top + plot_h / 2.0,
        escape(y_label)
    );

    for (k, s) in series.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        if m > 1 {
            let points: Vec<String> =
                s.values.iter().enumerate().map(|(i, &v)| format!("{:.2},{:.2}", x(i), y(v))).collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                points.join(" ")
            );
        } else {
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="4" fill="{color}"/>"#,
                x(0),
                y(s.values[0])
            );
        }
        let ly = top + 16.0 * k as f64 + 8.0;
        let lx = left + plot_w + 16.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><rect x="{lx:.2}" y="{:.2}" width="12" height="4" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            ly - 4.0,
            lx + 18.0,
            ly + 2.0,
            escape(&s.name)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn lerp_color(a: (u8, u8, u8), b: (u8, u8, u8), t: f64) -> String {
    let mix = |x: u8, y: u8| (f64::from(x) + (f64::from(y) - f64::from(x)) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}

const LOW: (u8, u8, u8) = (0xf7, 0xfb, 0xff);
const HIGH: (u8, u8, u8) = (0x08, 0x30, 0x6b);

/// Heat grid of `values[row][col]` with labels and a min/max color legend.
pub fn render_heatmap(
    title: &str,
    rows: &[String],
    columns: &[String],
    values: &[Vec<f64>],
) -> Result<String> {
    if rows.is_empty() || columns.is_empty() {
        return Err(Error::Config("heat grid needs at least one row and column".into()));
    }
    if values.len() != rows.len() || values.iter().any(|r| r.len() != columns.len()) {
        return Err(Error::Config("heat grid values do not match its labels".into()));
    }
    let cell = 64.0;
    let (left, top) = (150.0, 130.0);
    let width = left + cell * columns.len() as f64 + 140.0;
    let height = top + cell * rows.len() as f64 + 30.0;

    let lo = values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let shade = |v: f64| {
        let t = if span > 0.0 { (v - lo) / span } else { 0.0 };
        lerp_color(LOW, HIGH, t)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2}" height="{height:.2}" viewBox="0 0 {width:.2} {height:.2}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<defs><linearGradient id="scale" x1="0" y1="1" x2="0" y2="0"><stop offset="0" stop-color="{}"/><stop offset="1" stop-color="{}"/></linearGradient></defs>"#,
        lerp_color(LOW, HIGH, 0.0),
        lerp_color(LOW, HIGH, 1.0)
    );
    let _ = writeln!(svg, r#"<rect width="{width:.2}" height="{height:.2}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        width / 2.0,
        escape(title)
    );
    for (c, label) in columns.iter().enumerate() {
        let cx = left + cell * (c as f64 + 0.5);
        let _ = writeln!(
            svg,
            r#"<text class="col-label" x="{cx:.2}" y="{:.2}" text-anchor="start" transform="rotate(-45 {cx:.2} {:.2})">{}</text>"#,
            top - 8.0,
            top - 8.0,
            escape(label)
        );
    }
    for (r, label) in rows.iter().enumerate() {
        let _ = writeln!(
            svg,
            r#"<text class="row-label" x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            left - 8.0,
            top + cell * (r as f64 + 0.5) + 4.0,
            escape(label)
        );
        for (c, &v) in values[r].iter().enumerate() {
            let _ = writeln!(
                svg,
                r#"<rect class="cell" x="{:.2}" y="{:.2}" width="{cell:.2}" height="{cell:.2}" fill="{}" stroke="white"><title>{} / {}: {}</title></rect>"#,
                left + cell * c as f64,
                top + cell * r as f64,
                shade(v),
                escape(label),
                escape(&columns[c]),
                tick_label(v)
            );
        }
    }
    let lx = left + cell * columns.len() as f64 + 30.0;
    let lh = cell * rows.len() as f64;
    let _ = writeln!(
        svg,
        r#"<rect x="{lx:.2}" y="{top:.2}" width="16" height="{lh:.2}" fill="url(#scale)" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="legend-max" x="{:.2}" y="{:.2}">max {}</text>"#,
        lx + 22.0,
        top + 10.0,
        tick_label(hi)
    );
    let _ = writeln!(
        svg,
        r#"<text class="legend-min" x="{:.2}" y="{:.2}">min {}</text>"#,
        lx + 22.0,
        top + lh,
        tick_label(lo)
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Heat grid of per-topic values (framework order) over the framework's grid.
pub fn render_matrix_svg(framework: &TopicFramework, values: &[f64], title: &str) -> Result<String> {
    let grid = framework.grid().ok_or_else(|| {
        Error::Config(format!(
            "framework `{}` declares no rows/columns; render its values as a list or trend chart instead",
            framework.name
        ))
    })?;
    if values.len() != framework.len() {
        return Err(Error::Config(format!("{} values for {} topics", values.len(), framework.len())));
    }
    render_heatmap(title, &grid.rows, &grid.columns, &grid.arrange(values))
}
