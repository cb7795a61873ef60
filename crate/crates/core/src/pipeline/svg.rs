//! Static scatter plots with a least-squares line, rendered as SVG text.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::report::{QeReport, Trend};
use super::PipelineError;
use crate::atomic::write_atomic;
use crate::numfmt::sig;
use crate::stats::{linear_fit, Series};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 30.0;
const TOP: f64 = 50.0;
const BOTTOM: f64 = 70.0;
const TICKS: usize = 5;

#[derive(Debug, Clone)]
pub struct ScatterPlot<'a> {
    pub title: &'a str,
    pub x_label: &'a str,
    pub y_label: &'a str,
    pub points: &'a [(f64, f64)],
    /// `(slope, intercept, r2)` of the line to draw.
    pub fit: Option<(f64, f64, f64)>,
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && c != '\t' => out.push(' '),
            c => out.push(c),
        }
    }
    out
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    let span = hi - lo;
    let pad = if span > 0.0 {
        span * 0.05
    } else {
        lo.abs().max(1.0) * 0.05
    };
    (lo - pad, hi + pad)
}

pub fn scatter_svg(plot: &ScatterPlot<'_>) -> String {
    let (x0, x1) = range(plot.points.iter().map(|p| p.0));
    let (y0, y1) = range(plot.points.iter().map(|p| p.1));
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + plot_h - (y - y0) / (y1 - y0) * plot_h;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="{:.2}" y="28" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape(plot.title)
    )
    .unwrap();
    writeln!(
        s,
        r#"<rect x="{LEFT:.2}" y="{TOP:.2}" width="{plot_w:.2}" height="{plot_h:.2}" fill="none" stroke="black"/>"#
    )
    .unwrap();

    for i in 0..=TICKS {
        let f = i as f64 / TICKS as f64;
        let xv = x0 + f * (x1 - x0);
        let yv = y0 + f * (y1 - y0);
        let (px, py) = (sx(xv), sy(yv));
        let base = TOP + plot_h;
        writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{base:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/>"#,
            base + 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            base + 20.0,
            sig(xv, 4)
        )
        .unwrap();
        writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{LEFT:.2}" y2="{py:.2}" stroke="black"/>"#,
            LEFT - 5.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 8.0,
            py + 4.0,
            sig(yv, 4)
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 20.0,
        escape(plot.x_label)
    )
    .unwrap();
    writeln!(
        s,
        r#"<text x="20" y="{:.2}" text-anchor="middle" transform="rotate(-90 20 {:.2})">{}</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0,
        escape(plot.y_label)
    )
    .unwrap();

    for &(x, y) in plot.points {
        writeln!(
            s,
            r##"<circle cx="{:.2}" cy="{:.2}" r="3" fill="#1f77b4"/>"##,
            sx(x),
            sy(y)
        )
        .unwrap();
    }

    if let Some((slope, intercept, r2)) = plot.fit {
        let xa = plot.points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let xb = plot.points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        if xa.is_finite() && xb.is_finite() {
            writeln!(
                s,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#d62728" stroke-width="1.5"/>"##,
                sx(xa),
                sy(intercept + slope * xa),
                sx(xb),
                sy(intercept + slope * xb)
            )
            .unwrap();
        }
        let sign = if intercept < 0.0 { "-" } else { "+" };
        writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}">{}</text>"#,
            LEFT + 10.0,
            TOP + 18.0,
            escape(&format!(
                "y = {} x {sign} {}, r² = {}",
                sig(slope, 5),
                sig(intercept.abs(), 5),
                sig(r2, 4)
            ))
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn file_stem_for(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() {
                c.to_ascii_lowercase()
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `qe_trend.svg` plus one `qe_vs_<covariate>.svg` per correlation.
pub fn emit_svg_plots(report: &QeReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, PipelineError> {
    let dir = dir.as_ref();
    let io = |path: &Path| {
        let path = path.to_owned();
        move |source| PipelineError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut written = Vec::new();

    let trend_points: Vec<(f64, f64)> = report.rows.iter().map(|r| (r.year, r.qe)).collect();
    let trend_fit = match &report.trend {
        Trend::Fitted(r) => Some((r.slope, r.intercept, r.r2)),
        Trend::Degenerate { .. } => None,
    };
    let title = format!("SOM-QE by year: {}", report.roi_name);
    let svg = scatter_svg(&ScatterPlot {
        title: &title,
        x_label: "year",
        y_label: "SOM-QE",
        points: &trend_points,
        fit: trend_fit,
    });
    let path = dir.join("qe_trend.svg");
    write_atomic(&path, svg.as_bytes()).map_err(io(&path))?;
    written.push(path);

    for corr in &report.correlations {
        let points: Vec<(f64, f64)> = corr
            .values
            .iter()
            .copied()
            .zip(report.rows.iter().map(|r| r.qe))
            .collect();
        let fit = Series::new(&corr.label, points.clone())
            .ok()
            .and_then(|s| linear_fit(&s).ok())
            .map(|r| (r.slope, r.intercept, r.r2));
        let title = format!(
            "SOM-QE vs {}: {} (R = {})",
            corr.label,
            report.roi_name,
            sig(corr.result.r, 4)
        );
        let svg = scatter_svg(&ScatterPlot {
            title: &title,
            x_label: &corr.label,
            y_label: "SOM-QE",
            points: &points,
            fit,
        });
        let path = dir.join(format!("qe_vs_{}.svg", file_stem_for(&corr.label)));
        write_atomic(&path, svg.as_bytes()).map_err(io(&path))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn escapes_markup() {
        assert_eq!(escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    }

    #[test]
    fn plot_is_deterministic_and_contains_annotation() {
        let pts = [(1.0, 2.0), (2.0, 4.1), (3.0, 5.9)];
        let plot = ScatterPlot {
            title: "t",
            x_label: "x",
            y_label: "y",
            points: &pts,
            fit: Some((1.95, 0.1, 0.998)),
        };
        let a = scatter_svg(&plot);
        assert_eq!(a, scatter_svg(&plot));
        assert!(a.contains("y = 1.9500 x + 0.10000, r² = 0.9980"));
        assert_eq!(a.matches("<circle").count(), 3);
    }

    #[test]
    fn empty_and_constant_inputs_render() {
        let none = scatter_svg(&ScatterPlot {
            title: "e",
            x_label: "x",
            y_label: "y",
            points: &[],
            fit: None,
        });
        assert!(none.ends_with("</svg>\n"));
        let flat = scatter_svg(&ScatterPlot {
            title: "c",
            x_label: "x",
            y_label: "y",
            points: &[(1.0, 5.0), (1.0, 5.0)],
            fit: None,
        });
        assert!(!flat.contains("NaN") && !flat.contains("inf"));
    }
}
