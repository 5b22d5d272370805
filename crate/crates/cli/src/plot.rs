//! Minimal line-plot SVG writer.
//!
//! Output depends only on the table and axes, never on the environment,
//! so the same input always renders the same bytes.

use std::fmt::Write as _;

use anyhow::{bail, Result};

use crate::table::Table;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 55.0;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
const DASHES: [&str; 3] = ["", "6,4", "2,3"];

#[derive(Debug, Clone, PartialEq)]
pub struct AxesSpec {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    /// Metrics drawn on these axes; each series gets one line per metric.
    pub metrics: Vec<String>,
    /// Draw the 95% interval as error bars.
    pub error_bars: bool,
    /// Free text stored as an XML comment, e.g. provenance.
    pub comment: String,
}

impl AxesSpec {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, metrics: &[&str]) -> Self {
        AxesSpec {
            title: title.into(),
            x_label: x_label.into(),
            y_label: metrics.join(", "),
            metrics: metrics.iter().map(|m| m.to_string()).collect(),
            error_bars: true,
            comment: String::new(),
        }
    }
}

struct Line {
    label: String,
    points: Vec<(f64, f64, f64)>,
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Around five round tick values covering `[lo, hi]`.
fn ticks(lo: f64, hi: f64) -> Vec<f64> {
    let span = hi - lo;
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0].iter().map(|f| f * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
    let first = (lo / step).ceil() as i64;
    let last = (hi / step).floor() as i64;
    (first..=last).map(|k| k as f64 * step).collect()
}

fn label(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.1e}")
    } else {
        let s = format!("{v:.4}");
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" { "0".into() } else { s.into() }
    }
}

fn padded(lo: f64, hi: f64) -> (f64, f64) {
    if hi > lo {
        let pad = 0.05 * (hi - lo);
        (lo - pad, hi + pad)
    } else {
        let pad = if lo == 0.0 { 1.0 } else { 0.05 * lo.abs() };
        (lo - pad, hi + pad)
    }
}

/// Renders `table` on `axes` as an SVG document.
pub fn render_plot(table: &Table, axes: &AxesSpec) -> Result<String> {
    if table.rows.is_empty() {
        bail!("cannot plot an empty table");
    }
    let mut lines = Vec::new();
    for series in table.series() {
        for metric in &axes.metrics {
            if table.metric_index(metric).is_none() {
                bail!("table has no metric {metric:?}");
            }
            let points: Vec<(f64, f64, f64)> = table
                .points(series, metric)
                .into_iter()
                .filter(|(x, s)| x.is_finite() && s.mean.is_finite())
                .map(|(x, s)| (x, s.mean, if axes.error_bars && s.ci95.is_finite() { s.ci95 } else { 0.0 }))
                .collect();
            let label = if axes.metrics.len() > 1 { format!("{series} ({metric})") } else { series.to_string() };
            lines.push(Line { label, points });
        }
    }
    let all: Vec<&(f64, f64, f64)> = lines.iter().flat_map(|l| &l.points).collect();
    if all.is_empty() {
        bail!("no finite points to plot");
    }
    let fold = |f: fn(&(f64, f64, f64)) -> f64, init: f64, pick: fn(f64, f64) -> f64| all.iter().map(|p| f(p)).fold(init, pick);
    let (x0, x1) = padded(fold(|p| p.0, f64::INFINITY, f64::min), fold(|p| p.0, f64::NEG_INFINITY, f64::max));
    let (y0, y1) = padded(fold(|p| p.1 - p.2, f64::INFINITY, f64::min), fold(|p| p.1 + p.2, f64::NEG_INFINITY, f64::max));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    if !axes.comment.is_empty() {
        let _ = writeln!(svg, "<!-- {} -->", axes.comment.replace("--", "- -"));
    }
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(svg, r#"<text x="{:.2}" y="22" text-anchor="middle" font-size="14">{}</text>"#, LEFT + plot_w / 2.0, escape(&axes.title));
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    for t in ticks(x0, x1) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            label(t)
        );
    }
    for t in ticks(y0, y1) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{LEFT}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            y + 4.0,
            label(t)
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 12.0,
        escape(&axes.x_label)
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(&axes.y_label)
    );

    for (i, line) in lines.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let dash = DASHES[(i / PALETTE.len()) % DASHES.len()];
        let dash_attr = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        let pts: Vec<String> = line.points.iter().map(|&(x, y, _)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="series" fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{}"/>"#,
            pts.join(" ")
        );
        for &(x, y, ci) in &line.points {
            if ci > 0.0 {
                let _ = writeln!(
                    svg,
                    r#"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="{color}"/>"#,
                    sx(x),
                    sy(y - ci),
                    sx(x),
                    sy(y + ci)
                );
            }
            let _ = writeln!(svg, r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y));
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = WIDTH - RIGHT + 10.0;
        let _ = writeln!(
            svg,
            r#"<g class="legend"><line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="1.5"{dash_attr}/><text x="{:.2}" y="{:.2}">{}</text></g>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(&line.label)
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Renders and writes the plot to `path`.
pub fn emit_plot(table: &Table, axes: &AxesSpec, path: &std::path::Path) -> Result<()> {
    let svg = render_plot(table, axes)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Summary;
    use crate::table::Row;

    fn table(series: &[&str], points: usize) -> Table {
        let mut t = Table::new("x", &["m"]);
        for s in series {
            for i in 0..points {
                let v = Summary { mean: 1.0 + 0.1 * i as f64, std: 0.01, ci95: 0.02 };
                t.rows.push(Row { series: s.to_string(), x: i as f64, reps: 5, nonconverged: 0, values: vec![v] });
            }
        }
        t
    }

    #[test]
    fn four_points_four_markers() {
        let svg = render_plot(&table(&["a"], 4), &AxesSpec::new("t", "x", &["m"])).unwrap();
        assert_eq!(svg.matches(r#"class="marker""#).count(), 4);
        assert_eq!(svg.matches(r#"class="series""#).count(), 1);
    }

    #[test]
    fn two_series_two_lines_and_legend() {
        let svg = render_plot(&table(&["a", "b <5dB>"], 3), &AxesSpec::new("t", "x", &["m"])).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert_eq!(svg.matches(r#"class="legend""#).count(), 2);
        assert!(svg.contains("b &lt;5dB&gt;"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let mut axes = AxesSpec::new("t", "x", &["m"]);
        axes.comment = "spec abc seed 1".into();
        let a = render_plot(&table(&["a", "b"], 5), &axes).unwrap();
        let b = render_plot(&table(&["a", "b"], 5), &axes).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("<!-- spec abc seed 1 -->"));
    }

    #[test]
    fn empty_or_unknown_is_an_error() {
        assert!(render_plot(&Table::new("x", &["m"]), &AxesSpec::new("t", "x", &["m"])).is_err());
        assert!(render_plot(&table(&["a"], 2), &AxesSpec::new("t", "x", &["zzz"])).is_err());
    }

    #[test]
    fn flat_line_still_renders() {
        let mut t = table(&["a"], 1);
        t.rows[0].values[0].ci95 = 0.0;
        let svg = render_plot(&t, &AxesSpec::new("t", "x", &["m"])).unwrap();
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn tick_values_are_round() {
        assert_eq!(ticks(0.0, 10.0), vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
        assert_eq!(label(0.30000000000000004), "0.3");
        assert_eq!(label(2e-5), "2.0e-5");
    }
}
