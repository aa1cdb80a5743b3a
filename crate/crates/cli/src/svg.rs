//! Minimal self-contained SVG line plots.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlotError {
    #[error("nothing to plot: {0}")]
    Empty(String),
    #[error("cannot write plot: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

impl Series {
    pub fn new(label: impl Into<String>, points: Vec<(f64, f64)>) -> Self {
        Self {
            label: label.into(),
            points,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlotOptions {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub log_x: bool,
    pub log_y: bool,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 50.0;
const TICKS: usize = 5;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn tick_label(v: f64, log: bool) -> String {
    if log {
        format!("1e{v:.1}")
    } else {
        format!("{v:.4}")
    }
}

/// Data range padded so a flat series still spans a nonzero height.
fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if hi - lo > 1e-12 * hi.abs().max(1.0) {
        (lo, hi)
    } else {
        let pad = 0.5 * lo.abs().max(1.0);
        (lo - pad, hi + pad)
    }
}

/// Renders the plot. Points that are non-finite after the axis transform
/// (including nonpositive values on a log axis) are dropped.
pub fn render_plot(series: &[Series], opts: &PlotOptions) -> Result<String, PlotError> {
    if series.is_empty() {
        return Err(PlotError::Empty("no series".into()));
    }
    let tx = |v: f64| if opts.log_x { v.log10() } else { v };
    let ty = |v: f64| if opts.log_y { v.log10() } else { v };
    let mut mapped = Vec::with_capacity(series.len());
    for s in series {
        if s.points.is_empty() {
            return Err(PlotError::Empty(format!("series `{}` has no points", s.label)));
        }
        let pts: Vec<(f64, f64)> = s
            .points
            .iter()
            .map(|&(x, y)| (tx(x), ty(y)))
            .filter(|(x, y)| x.is_finite() && y.is_finite())
            .collect();
        mapped.push(pts);
    }
    if mapped.iter().all(Vec::is_empty) {
        return Err(PlotError::Empty("no finite points".into()));
    }
    let (x0, x1) = range(mapped.iter().flatten().map(|p| p.0));
    let (y0, y1) = range(mapped.iter().flatten().map(|p| p.1));
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !opts.title.is_empty() {
        let _ = writeln!(
            out,
            r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
            WIDTH / 2.0,
            escape(&opts.title)
        );
    }
    let (bx, by) = (LEFT, TOP + ph);
    let _ = writeln!(
        out,
        r#"<g class="axes" stroke="black" fill="none"><line x1="{bx}" y1="{by}" x2="{}" y2="{by}"/><line x1="{bx}" y1="{by}" x2="{bx}" y2="{TOP}"/></g>"#,
        LEFT + pw
    );
    for k in 0..=TICKS {
        let f = k as f64 / TICKS as f64;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            out,
            r#"<line x1="{px:.2}" y1="{by}" x2="{px:.2}" y2="{}" stroke="black"/><text x="{px:.2}" y="{}" text-anchor="middle">{}</text>"#,
            by + 5.0,
            by + 18.0,
            tick_label(xv, opts.log_x)
        );
        let _ = writeln!(
            out,
            r#"<line x1="{}" y1="{py:.2}" x2="{bx}" y2="{py:.2}" stroke="black"/><text x="{}" y="{:.2}" text-anchor="end">{}</text>"#,
            bx - 5.0,
            bx - 8.0,
            py + 4.0,
            tick_label(yv, opts.log_y)
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + pw / 2.0,
        HEIGHT - 10.0,
        escape(&opts.x_label)
    );
    let _ = writeln!(
        out,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">{}</text>"#,
        TOP + ph / 2.0,
        TOP + ph / 2.0,
        escape(&opts.y_label)
    );
    for (i, pts) in mapped.iter().enumerate() {
        let coords: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="1.5" points="{}"/>"#,
            COLORS[i % COLORS.len()],
            coords.join(" ")
        );
    }
    if series.len() >= 2 {
        let _ = writeln!(out, r#"<g class="legend">"#);
        for (i, s) in series.iter().enumerate() {
            let y = TOP + 10.0 + 16.0 * i as f64;
            let x = LEFT + pw - 150.0;
            let _ = writeln!(
                out,
                r#"<line x1="{x}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
                x + 20.0,
                COLORS[i % COLORS.len()],
                x + 26.0,
                y + 4.0,
                escape(&s.label)
            );
        }
        let _ = writeln!(out, "</g>");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

pub fn emit_plot(series: &[Series], path: &Path, opts: &PlotOptions) -> Result<(), PlotError> {
    let svg = render_plot(series, opts)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Series {
        Series::new("a", (0..n).map(|i| (i as f64 + 1.0, (i * i) as f64 + 1.0)).collect())
    }

    #[test]
    fn one_series_gives_one_polyline_without_legend() {
        let svg = render_plot(&[line(10)], &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 10);
        assert!(!svg.contains("class=\"legend\""));
    }

    #[test]
    fn two_series_get_a_legend() {
        let mut b = line(4);
        b.label = "b".into();
        let svg = render_plot(&[line(4), b], &PlotOptions::default()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 2);
        let legend = svg.split("class=\"legend\"").nth(1).unwrap();
        assert_eq!(legend.matches("<text").count(), 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(render_plot(&[], &PlotOptions::default()), Err(PlotError::Empty(_))));
        let e = render_plot(&[Series::new("x", vec![])], &PlotOptions::default());
        assert!(matches!(e, Err(PlotError::Empty(_))));
    }

    #[test]
    fn log_scale_drops_nonpositive_values() {
        let opts = PlotOptions {
            log_y: true,
            ..Default::default()
        };
        let s = Series::new("z", vec![(1.0, 0.0), (2.0, 1.0), (3.0, 10.0)]);
        let svg = render_plot(&[s], &opts).unwrap();
        let pts = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
        assert_eq!(pts.split(' ').count(), 2);
        assert!(svg.contains("1e1.0"));
        let zero = Series::new("z", vec![(1.0, 0.0)]);
        assert!(matches!(render_plot(&[zero], &opts), Err(PlotError::Empty(_))));
    }

    #[test]
    fn flat_series_renders() {
        let s = Series::new("flat", vec![(0.0, 2.0), (1.0, 2.0)]);
        assert!(render_plot(&[s], &PlotOptions::default()).is_ok());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let e = emit_plot(&[line(2)], Path::new("/nonexistent-dir/x.svg"), &PlotOptions::default());
        assert!(matches!(e, Err(PlotError::Io(_))));
    }
}
