//! Plot data files and a small self-contained SVG renderer.
//!
//! Every plot is written twice: `<name>.dat` holds the numbers as
//! whitespace-separated columns (one block per series, blocks separated by
//! two blank lines), `<name>.svg` draws them.

use std::fmt::Write;

use tubelab::io::format_float;

#[derive(Debug, Clone)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub series: Vec<Series>,
    /// Dashed horizontal reference line, e.g. y = 0.
    pub reference: Option<f64>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_Y: f64 = 50.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn short(x: f64) -> String {
    format!("{x:.3e}")
}

impl Plot {
    pub fn data(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.series.iter().enumerate() {
            if i > 0 {
                out.push_str("\n\n");
            }
            let _ = writeln!(out, "# {}", s.label);
            let _ = writeln!(out, "# {} {}", self.x_label, self.y_label);
            for &(x, y) in &s.points {
                let _ = writeln!(out, "{} {}", format_float(x), format_float(y));
            }
        }
        out
    }

    fn range(&self) -> Option<((f64, f64), (f64, f64))> {
        let finite = self
            .series
            .iter()
            .flat_map(|s| s.points.iter())
            .filter(|(x, y)| x.is_finite() && y.is_finite());
        let mut bounds: Option<((f64, f64), (f64, f64))> = None;
        for &(x, y) in finite {
            let ((x0, x1), (y0, y1)) = bounds.unwrap_or(((x, x), (y, y)));
            bounds = Some(((x0.min(x), x1.max(x)), (y0.min(y), y1.max(y))));
        }
        let ((mut x0, mut x1), (mut y0, mut y1)) = bounds?;
        if let Some(r) = self.reference {
            y0 = y0.min(r);
            y1 = y1.max(r);
        }
        // widen degenerate ranges so a single point sits mid-frame
        let pad = |lo: &mut f64, hi: &mut f64| {
            if *hi - *lo <= f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
                let d = 0.5 * lo.abs().max(1.0);
                *lo -= d;
                *hi += d;
            }
        };
        pad(&mut x0, &mut x1);
        pad(&mut y0, &mut y1);
        let margin = 0.05 * (y1 - y0);
        Some(((x0, x1), (y0 - margin, y1 + margin)))
    }

    pub fn svg(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
        let _ = writeln!(
            out,
            r#"<text x="{}" y="25" text-anchor="middle" font-size="14">{}</text>"#,
            (MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2.0,
            escape(&self.title)
        );
        let (left, right, top, bottom) = (MARGIN_LEFT, WIDTH - MARGIN_RIGHT, MARGIN_Y, HEIGHT - MARGIN_Y);
        let _ = writeln!(
            out,
            r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            right - left,
            bottom - top
        );
        let _ = writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            (left + right) / 2.0,
            HEIGHT - 12.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            out,
            r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
            (top + bottom) / 2.0,
            escape(&self.y_label)
        );
        let Some(((x0, x1), (y0, y1))) = self.range() else {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">no finite data</text>"#,
                (left + right) / 2.0,
                (top + bottom) / 2.0
            );
            out.push_str("</svg>\n");
            return out;
        };
        let sx = |x: f64| left + (x - x0) / (x1 - x0) * (right - left);
        let sy = |y: f64| bottom - (y - y0) / (y1 - y0) * (bottom - top);
        for (value, anchor_x, anchor_y, anchor) in
            [(x0, sx(x0), bottom + 16.0, "start"), (x1, sx(x1), bottom + 16.0, "end")]
        {
            let _ = writeln!(
                out,
                r#"<text x="{anchor_x:.2}" y="{anchor_y:.2}" text-anchor="{anchor}">{}</text>"#,
                short(value)
            );
        }
        for value in [y0, y1] {
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
                left - 4.0,
                sy(value) + 4.0,
                short(value)
            );
        }
        if let Some(r) = self.reference {
            let _ = writeln!(
                out,
                r#"<line x1="{left}" y1="{0:.2}" x2="{right}" y2="{0:.2}" stroke="gray" stroke-dasharray="4 3"/>"#,
                sy(r)
            );
        }
        for (i, s) in self.series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let points: Vec<(f64, f64)> = s
                .points
                .iter()
                .filter(|(x, y)| x.is_finite() && y.is_finite())
                .map(|&(x, y)| (sx(x), sy(y)))
                .collect();
            if points.len() >= 2 {
                let path: Vec<String> = points.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
                let _ = writeln!(
                    out,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                    path.join(" ")
                );
            }
            // markers only where they stay legible
            if points.len() <= 64 {
                for (x, y) in &points {
                    let _ = writeln!(out, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{color}"/>"#);
                }
            }
            let ly = top + 16.0 + 18.0 * i as f64;
            let _ = writeln!(
                out,
                r#"<rect x="{:.2}" y="{:.2}" width="12" height="3" fill="{color}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                right + 10.0,
                ly - 4.0,
                right + 28.0,
                ly,
                escape(&s.label)
            );
        }
        out.push_str("</svg>\n");
        out
    }
}
