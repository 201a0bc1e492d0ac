//! Minimal static SVG line plots.

use std::fmt::Write;

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD: f64 = 50.0;
const COLORS: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: &str, ys: &[f64]) -> Self {
        Self {
            label: label.to_string(),
            points: ys.iter().enumerate().map(|(i, &y)| (i as f64, y)).collect(),
        }
    }
}

/// One panel per `(title, series, log_y)`, stacked vertically.
pub fn plot(panels: &[(&str, Vec<Series>, bool)]) -> String {
    let total_h = H * panels.len().max(1) as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{total_h}" viewBox="0 0 {W} {total_h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (k, (title, series, log_y)) in panels.iter().enumerate() {
        panel(&mut out, k as f64 * H, title, series, *log_y);
    }
    out.push_str("</svg>\n");
    out
}

fn panel(out: &mut String, top: f64, title: &str, series: &[Series], log_y: bool) {
    let tf = |y: f64| if log_y { y.max(1e-300).log10() } else { y };
    let pts = series.iter().flat_map(|s| s.points.iter()).filter(|p| p.0.is_finite() && tf(p.1).is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(tf(y));
        y1 = y1.max(tf(y));
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 <= x0 {
        x1 = x0 + 1.0;
    }
    if y1 <= y0 {
        let pad = if y0 == 0.0 { 1.0 } else { 0.5 * y0.abs() };
        (y0, y1) = (y0 - pad, y1 + pad);
    }
    let sx = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let sy = |y: f64| top + H - PAD - (tf(y) - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let _ = writeln!(
        out,
        r#"<rect x="{PAD}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        top + PAD,
        W - 2.0 * PAD,
        H - 2.0 * PAD
    );
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, W / 2.0, top + PAD - 15.0, escape(title));
    let label = |v: f64| if log_y { format!("1e{v:.1}") } else { format!("{v:.4}") };
    let _ = writeln!(out, r#"<text x="5" y="{}">{}</text>"#, top + PAD + 4.0, label(y1));
    let _ = writeln!(out, r#"<text x="5" y="{}">{}</text>"#, top + H - PAD, label(y0));
    let _ = writeln!(out, r#"<text x="{PAD}" y="{}">{x0}</text>"#, top + H - PAD + 18.0);
    let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{x1}</text>"#, W - PAD, top + H - PAD + 18.0);
    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .points
            .iter()
            .filter(|p| p.0.is_finite() && tf(p.1).is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">{}</text>"#,
            W - PAD - 150.0,
            top + PAD + 16.0 * (i + 1) as f64,
            escape(&s.label)
        );
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
