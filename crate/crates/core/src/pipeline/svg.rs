//! Minimal static SVG line and bar charts.

use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#7f7f7f"];

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
    /// Draw as a right-continuous step function.
    pub step: bool,
    pub dashed: bool,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn header(out: &mut String, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="24" text-anchor="middle" font-size="15">{}</text>"#,
        WIDTH / 2.0,
        escape(title)
    );
}

/// Line chart with axes, tick labels at the extremes and a legend.
pub fn line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series], note: Option<&str>) -> String {
    let (x0, x1) = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y0, y1) = extent(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    header(&mut out, title);
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        out,
        r#"<path d="M{left:.1},{top:.1} V{bottom:.1} H{right:.1}" fill="none" stroke="black"/>"#
    );
    for (v, x) in [(x0, left), (x1, right)] {
        let _ = writeln!(out, r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{v:.3}</text>"#, bottom + 16.0);
    }
    for (v, y) in [(y0, bottom), (y1, top)] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{y:.1}" text-anchor="end">{v:.3}</text>"#, left - 6.0);
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0,
        escape(x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="16" y="{:.1}" text-anchor="middle" transform="rotate(-90 16 {:.1})">{}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        escape(y_label)
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let mut d = String::new();
        for (k, &(x, y)) in s.points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()).enumerate() {
            let _ = if k == 0 {
                write!(d, "M{:.2},{:.2}", sx(x), sy(y))
            } else if s.step {
                write!(d, " H{:.2} V{:.2}", sx(x), sy(y))
            } else {
                write!(d, " L{:.2},{:.2}", sx(x), sy(y))
            };
        }
        let dash = if s.dashed { r#" stroke-dasharray="5,4""# } else { "" };
        let _ = writeln!(out, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#);
        let ly = top + 14.0 + 16.0 * i as f64;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="2"{dash}/><text x="{:.1}" y="{:.1}">{}</text>"#,
            right - 150.0,
            right - 130.0,
            right - 124.0,
            ly + 4.0,
            escape(&s.label)
        );
    }
    if let Some(note) = note {
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.1}">{}</text>"#,
            left + 10.0,
            bottom - 10.0,
            escape(note)
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Horizontal bars, one per label, drawn from a zero line.
pub fn bar_chart(title: &str, bars: &[(String, f64)]) -> String {
    let lo = bars.iter().map(|b| b.1).fold(0.0f64, f64::min);
    let hi = bars.iter().map(|b| b.1).fold(0.0f64, f64::max);
    let span = if hi - lo > 0.0 { hi - lo } else { 1.0 };
    let label_w = 170.0;
    let plot_w = WIDTH - label_w - MARGIN;
    let sx = |v: f64| label_w + (v - lo) / span * plot_w;
    let row_h = ((HEIGHT - 2.0 * MARGIN) / bars.len().max(1) as f64).min(28.0);

    let mut out = String::new();
    header(&mut out, title);
    let zero = sx(0.0);
    let _ = writeln!(
        out,
        r#"<line x1="{zero:.1}" y1="{MARGIN:.1}" x2="{zero:.1}" y2="{:.1}" stroke="black"/>"#,
        HEIGHT - MARGIN
    );
    for (i, (label, v)) in bars.iter().enumerate() {
        let y = MARGIN + i as f64 * row_h;
        let (a, b) = (sx(v.min(0.0)), sx(v.max(0.0)));
        let color = if *v >= 0.0 { COLORS[1] } else { COLORS[0] };
        let _ = writeln!(
            out,
            r#"<rect x="{a:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}"/>"#,
            y + 2.0,
            b - a,
            row_h - 4.0
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.1}" y="{:.2}" text-anchor="end">{}</text>"#,
            label_w - 6.0,
            y + row_h / 2.0 + 4.0,
            escape(label)
        );
    }
    out.push_str("</svg>\n");
    out
}
